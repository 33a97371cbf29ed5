//! Transform stage: maps an input tensor to the representation that gets
//! pruned and packed, and back.
//!
//! [`Identity`] is the default. [`MeanPool2x`] halves both spatial
//! dimensions by 2×2 averaging and inverts by nearest-neighbour upsampling;
//! it is lossy, which is what the final statistics refinement corrects for.
//! Custom transforms implement [`FeatureTransform`] and register under ids
//! 2..=255.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransformId(pub u8);

impl TransformId {
    pub const IDENTITY: TransformId = TransformId(0);
    pub const MEAN_POOL_2X: TransformId = TransformId(1);
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TransformId::IDENTITY => f.write_str("identity"),
            TransformId::MEAN_POOL_2X => f.write_str("meanpool2x"),
            TransformId(n) => write!(f, "custom-{n}"),
        }
    }
}

pub trait FeatureTransform: Send + Sync {
    fn id(&self) -> TransformId;

    /// Spatial size of the forward output for an `height × width` input.
    fn reduced_dims(&self, height: usize, width: usize) -> (usize, usize);

    fn forward(&self, t: &FeatureTensor) -> Result<FeatureTensor>;

    /// Maps a reduced tensor back to `height × width`.
    fn inverse(&self, t: &FeatureTensor, height: usize, width: usize) -> Result<FeatureTensor>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Identity;

impl FeatureTransform for Identity {
    fn id(&self) -> TransformId {
        TransformId::IDENTITY
    }

    fn reduced_dims(&self, height: usize, width: usize) -> (usize, usize) {
        (height, width)
    }

    fn forward(&self, t: &FeatureTensor) -> Result<FeatureTensor> {
        Ok(t.clone())
    }

    fn inverse(&self, t: &FeatureTensor, height: usize, width: usize) -> Result<FeatureTensor> {
        if (t.height(), t.width()) != (height, width) {
            return Err(Error::domain(
                "identity transform cannot change spatial size",
            ));
        }
        Ok(t.clone())
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct MeanPool2x;

impl FeatureTransform for MeanPool2x {
    fn id(&self) -> TransformId {
        TransformId::MEAN_POOL_2X
    }

    fn reduced_dims(&self, height: usize, width: usize) -> (usize, usize) {
        (height.div_ceil(2), width.div_ceil(2))
    }

    fn forward(&self, t: &FeatureTensor) -> Result<FeatureTensor> {
        let (h, w) = (t.height(), t.width());
        let (rh, rw) = self.reduced_dims(h, w);
        let mut data = Vec::with_capacity(t.channels() * rh * rw);
        for plane in t.channel_iter() {
            for y in 0..rh {
                for x in 0..rw {
                    let mut sum = 0f64;
                    let mut n = 0u32;
                    for sy in 2 * y..(2 * y + 2).min(h) {
                        for sx in 2 * x..(2 * x + 2).min(w) {
                            sum += plane[sy * w + sx] as f64;
                            n += 1;
                        }
                    }
                    data.push((sum / n as f64) as f32);
                }
            }
        }
        FeatureTensor::new(t.channels(), rh, rw, data)
    }

    fn inverse(&self, t: &FeatureTensor, height: usize, width: usize) -> Result<FeatureTensor> {
        if self.reduced_dims(height, width) != (t.height(), t.width()) {
            return Err(Error::domain(format!(
                "{}x{} tensor cannot be unpooled to {height}x{width}",
                t.height(),
                t.width()
            )));
        }
        let rw = t.width();
        let mut data = Vec::with_capacity(t.channels() * height * width);
        for plane in t.channel_iter() {
            for y in 0..height {
                let row = &plane[(y / 2) * rw..(y / 2 + 1) * rw];
                data.extend((0..width).map(|x| row[x / 2]));
            }
        }
        FeatureTensor::new(t.channels(), height, width, data)
    }
}

#[derive(Clone)]
pub struct TransformRegistry {
    transforms: BTreeMap<TransformId, Arc<dyn FeatureTransform>>,
}

impl Default for TransformRegistry {
    fn default() -> Self {
        let mut transforms: BTreeMap<TransformId, Arc<dyn FeatureTransform>> = BTreeMap::new();
        transforms.insert(TransformId::IDENTITY, Arc::new(Identity));
        transforms.insert(TransformId::MEAN_POOL_2X, Arc::new(MeanPool2x));
        Self { transforms }
    }
}

impl fmt::Debug for TransformRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.transforms.keys().map(|k| k.0))
            .finish()
    }
}

impl TransformRegistry {
    pub fn register(&mut self, transform: Arc<dyn FeatureTransform>) -> Result<()> {
        let id = transform.id();
        if self.transforms.contains_key(&id) {
            return Err(Error::config(format!(
                "transform id {} already registered",
                id.0
            )));
        }
        self.transforms.insert(id, transform);
        Ok(())
    }

    pub fn get(&self, id: TransformId) -> Result<&Arc<dyn FeatureTransform>> {
        self.transforms
            .get(&id)
            .ok_or_else(|| Error::domain(format!("no transform registered for id {}", id.0)))
    }
}
