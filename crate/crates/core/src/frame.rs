use crate::error::{Error, Result};

/// Row-major 2D sample grid. Real-valued before conversion (`f32`), integer
/// after (`u16`).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame2D<T> {
    height: usize,
    width: usize,
    samples: Vec<T>,
}

impl<T: Copy> Frame2D<T> {
    pub fn new(height: usize, width: usize, samples: Vec<T>) -> Result<Self> {
        if height.checked_mul(width) != Some(samples.len()) {
            return Err(Error::domain(format!(
                "frame of {height}x{width} needs {} samples, got {}",
                height.saturating_mul(width),
                samples.len()
            )));
        }
        Ok(Self {
            height,
            width,
            samples,
        })
    }

    pub fn filled(height: usize, width: usize, value: T) -> Self {
        Self {
            height,
            width,
            samples: vec![value; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.samples[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.samples[row * self.width..(row + 1) * self.width]
    }
}

pub type RealFrame = Frame2D<f32>;
pub type SampleFrame = Frame2D<u16>;
