//! Feature tensors, global statistics and statistical refinement.
//!
//! A [`FeatureTensor`] is a `C×H×W` block of binary32 values stored
//! channel-major. The codec transmits the global mean and population
//! standard deviation of a tensor at two points of the pipeline and, on the
//! decoder side, maps the reconstruction back onto those statistics with
//! [`apply_refinement`].

use crate::error::{Error, Result};

/// `C×H×W` tensor of finite binary32 values in channel-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl FeatureTensor {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::domain(format!(
                "tensor dimensions must be positive, got {channels}x{height}x{width}"
            )));
        }
        let expected = channels
            .checked_mul(height)
            .and_then(|n| n.checked_mul(width))
            .ok_or_else(|| Error::domain("tensor element count overflows"))?;
        if data.len() != expected {
            return Err(Error::domain(format!(
                "tensor data has {} values, expected {expected}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("tensor element {i} is not finite")));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    /// Tensor filled with a single value.
    pub fn filled(channels: usize, height: usize, width: usize, value: f32) -> Result<Self> {
        Self::new(
            channels,
            height,
            width,
            vec![value; channels.saturating_mul(height).saturating_mul(width)],
        )
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    /// Number of elements in one channel plane.
    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_iter(&self) -> impl ExactSizeIterator<Item = &[f32]> {
        self.data.chunks_exact(self.plane_len())
    }
}

/// Ordered list of tensors (e.g. the levels of a feature pyramid).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGroup {
    entries: Vec<(String, FeatureTensor)>,
}

impl TensorGroup {
    pub const MAX_TENSORS: usize = 8;

    pub fn new(entries: Vec<(String, FeatureTensor)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::config(
                "tensor group must contain at least one tensor",
            ));
        }
        if entries.len() > Self::MAX_TENSORS {
            return Err(Error::config(format!(
                "tensor group holds at most {} tensors, got {}",
                Self::MAX_TENSORS,
                entries.len()
            )));
        }
        if let Some((label, _)) = entries.iter().find(|(l, _)| l.len() > u8::MAX as usize) {
            return Err(Error::config(format!(
                "label of {} bytes exceeds 255",
                label.len()
            )));
        }
        Ok(Self { entries })
    }

    /// Group of unlabeled tensors.
    pub fn unlabeled(tensors: Vec<FeatureTensor>) -> Result<Self> {
        Self::new(tensors.into_iter().map(|t| (String::new(), t)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tensors(&self) -> impl ExactSizeIterator<Item = &FeatureTensor> {
        self.entries.iter().map(|(_, t)| t)
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn entries(&self) -> &[(String, FeatureTensor)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(String, FeatureTensor)> {
        self.entries
    }
}

/// Global mean and population standard deviation of a tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalStats {
    pub mu: f64,
    pub sigma: f64,
}

impl GlobalStats {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::domain(format!(
                "invalid statistics (mu={mu}, sigma={sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// The statistics as they travel on the wire (binary32).
    pub fn to_wire(self) -> (f32, f32) {
        (self.mu as f32, self.sigma as f32)
    }

    /// Rounds both values through binary32, matching what a decoder sees.
    pub fn rounded_to_wire(self) -> Self {
        let (mu, sigma) = self.to_wire();
        Self {
            mu: mu as f64,
            sigma: sigma as f64,
        }
    }
}

/// Mean and population standard deviation over all elements.
pub fn compute_global_stats(t: &FeatureTensor) -> GlobalStats {
    stats_of(t.data())
}

/// Two-pass mean/variance accumulated in `f64`.
pub(crate) fn stats_of(values: &[f32]) -> GlobalStats {
    if values.is_empty() {
        return GlobalStats {
            mu: 0.0,
            sigma: 0.0,
        };
    }
    let n = values.len() as f64;
    let mu = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| {
            let d = v as f64 - mu;
            d * d
        })
        .sum::<f64>()
        / n;
    GlobalStats {
        mu,
        sigma: var.sqrt(),
    }
}

/// Affinely maps `t` so that its global statistics become `target`.
///
/// A tensor with zero spread has no direction to stretch along; the result is
/// then the constant `target.mu`.
pub fn apply_refinement(t: &FeatureTensor, target: GlobalStats) -> FeatureTensor {
    let current = compute_global_stats(t);
    let data = refine_values(t.data(), current, target);
    FeatureTensor {
        channels: t.channels,
        height: t.height,
        width: t.width,
        data,
    }
}

fn refine_values(values: &[f32], current: GlobalStats, target: GlobalStats) -> Vec<f32> {
    if current.sigma == 0.0 {
        return vec![target.mu as f32; values.len()];
    }
    let scale = target.sigma / current.sigma;
    values
        .iter()
        .map(|&v| (scale * (v as f64 - current.mu) + target.mu) as f32)
        .collect()
}
