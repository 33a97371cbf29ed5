//! Tiling of a feature tensor into a single 2D frame and back.
//!
//! Channels are laid out row-major, in index order, on a near-square grid of
//! `grid_rows × grid_cols` tiles with `grid_cols = ⌈√C⌉`. Tiles past the last
//! channel hold the tensor mean.

use crate::error::{Error, Result};
use crate::frame::RealFrame;
use crate::tensor::{compute_global_stats, FeatureTensor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingLayout {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub tile_h: usize,
    pub tile_w: usize,
    pub channel_count: usize,
    /// Channel held by each tile slot; empty means slot `i` holds channel `i`.
    pub permutation: Vec<usize>,
}

impl PackingLayout {
    /// Near-square grid for `channels` tiles of `tile_h × tile_w`.
    pub fn for_channels(channels: usize, tile_h: usize, tile_w: usize) -> Self {
        let grid_cols = ceil_sqrt(channels).max(1);
        let grid_rows = channels.div_ceil(grid_cols).max(1);
        Self {
            grid_rows,
            grid_cols,
            tile_h,
            tile_w,
            channel_count: channels,
            permutation: Vec::new(),
        }
    }

    pub fn frame_dims(&self) -> (usize, usize) {
        (self.grid_rows * self.tile_h, self.grid_cols * self.tile_w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channel_count == 0 || self.tile_h == 0 || self.tile_w == 0 {
            return Err(Error::domain("layout has an empty dimension"));
        }
        let slots = self.grid_rows.checked_mul(self.grid_cols);
        if slots.is_none_or(|s| s < self.channel_count) {
            return Err(Error::domain(format!(
                "{}x{} tile grid cannot hold {} channels",
                self.grid_rows, self.grid_cols, self.channel_count
            )));
        }
        if self.grid_rows.checked_mul(self.tile_h).is_none()
            || self.grid_cols.checked_mul(self.tile_w).is_none()
        {
            return Err(Error::domain("layout frame dimensions overflow"));
        }
        if !self.permutation.is_empty() {
            let mut seen = vec![false; self.channel_count];
            if self.permutation.len() != self.channel_count {
                return Err(Error::domain(
                    "permutation length differs from channel count",
                ));
            }
            for &c in &self.permutation {
                if c >= self.channel_count || std::mem::replace(&mut seen[c], true) {
                    return Err(Error::domain("layout permutation is not a permutation"));
                }
            }
        }
        Ok(())
    }

    fn channel_at_slot(&self, slot: usize) -> usize {
        if self.permutation.is_empty() {
            slot
        } else {
            self.permutation[slot]
        }
    }
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

pub fn pack(t: &FeatureTensor) -> (RealFrame, PackingLayout) {
    let layout = PackingLayout::for_channels(t.channels(), t.height(), t.width());
    let (fh, fw) = layout.frame_dims();
    let pad = compute_global_stats(t).mu as f32;
    let mut frame = RealFrame::filled(fh, fw, pad);
    let samples = frame.samples_mut();
    for (c, plane) in t.channel_iter().enumerate() {
        let (gr, gc) = (c / layout.grid_cols, c % layout.grid_cols);
        for (y, row) in plane.chunks_exact(t.width()).enumerate() {
            let start = (gr * layout.tile_h + y) * fw + gc * layout.tile_w;
            samples[start..start + t.width()].copy_from_slice(row);
        }
    }
    (frame, layout)
}

pub fn unpack(frame: &RealFrame, layout: &PackingLayout) -> Result<FeatureTensor> {
    layout.validate()?;
    if frame.dims() != layout.frame_dims() {
        return Err(Error::domain(format!(
            "frame is {:?}, layout expects {:?}",
            frame.dims(),
            layout.frame_dims()
        )));
    }
    let plane = layout.tile_h * layout.tile_w;
    let mut data = vec![0f32; layout.channel_count * plane];
    for slot in 0..layout.channel_count {
        let c = layout.channel_at_slot(slot);
        let (gr, gc) = (slot / layout.grid_cols, slot % layout.grid_cols);
        for y in 0..layout.tile_h {
            let row = frame.row(gr * layout.tile_h + y);
            let src = &row[gc * layout.tile_w..(gc + 1) * layout.tile_w];
            let dst = c * plane + y * layout.tile_w;
            data[dst..dst + layout.tile_w].copy_from_slice(src);
        }
    }
    FeatureTensor::new(layout.channel_count, layout.tile_h, layout.tile_w, data)
}
