//! Channel importance scoring, pruning and decoder-side restoration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lcr::ChannelIndexSet;
use crate::tensor::{compute_global_stats, FeatureTensor};

/// Which channels were dropped from an `N`-channel tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneDecision {
    pruned: ChannelIndexSet,
}

impl PruneDecision {
    pub fn new(pruned: ChannelIndexSet) -> Self {
        Self { pruned }
    }

    pub fn none(total_channels: usize) -> Self {
        Self::new(ChannelIndexSet::empty(total_channels))
    }

    pub fn pruned(&self) -> &ChannelIndexSet {
        &self.pruned
    }

    pub fn total_channels(&self) -> usize {
        self.pruned.total_channels()
    }

    pub fn kept_count(&self) -> usize {
        self.pruned.total_channels() - self.pruned.len()
    }
}

/// Per-channel energy (mean of squared values).
///
/// Channels are scored in parallel; each score is a sequential sum over its
/// own plane so the result does not depend on the thread count.
pub fn score_channels(t: &FeatureTensor) -> Vec<f64> {
    let n = t.plane_len() as f64;
    t.data()
        .par_chunks_exact(t.plane_len())
        .map(|plane| plane.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>() / n)
        .collect()
}

/// Prunes the `⌊ratio·C⌋` lowest-scoring channels, lower index first on ties.
pub fn select_pruned(scores: &[f64], ratio: f64) -> Result<PruneDecision> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::domain(format!("prune ratio {ratio} outside [0, 1]")));
    }
    let c = scores.len();
    let k = ((ratio * c as f64).floor() as usize).min(c);
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut pruned: Vec<usize> = order.into_iter().take(k).collect();
    pruned.sort_unstable();
    Ok(PruneDecision::new(ChannelIndexSet::new(pruned, c)?))
}

/// Drops the pruned channels, keeping the rest in their original order.
pub fn prune_channels(t: &FeatureTensor, d: &PruneDecision) -> Result<FeatureTensor> {
    if d.total_channels() != t.channels() {
        return Err(Error::domain(format!(
            "prune decision covers {} channels, tensor has {}",
            d.total_channels(),
            t.channels()
        )));
    }
    if d.kept_count() == 0 {
        return Err(Error::domain("pruning would remove every channel"));
    }
    let mut data = Vec::with_capacity(d.kept_count() * t.plane_len());
    for (c, plane) in t.channel_iter().enumerate() {
        if !d.pruned().contains(c) {
            data.extend_from_slice(plane);
        }
    }
    FeatureTensor::new(d.kept_count(), t.height(), t.width(), data)
}

/// Reinserts the kept channels at their original indices and fills every
/// pruned channel with the global mean of `t`.
pub fn restore_channels(t: &FeatureTensor, d: &PruneDecision) -> Result<FeatureTensor> {
    if t.channels() != d.kept_count() {
        return Err(Error::domain(format!(
            "tensor has {} channels, decision keeps {}",
            t.channels(),
            d.kept_count()
        )));
    }
    if d.pruned().is_empty() {
        return Ok(t.clone());
    }
    let fill = compute_global_stats(t).mu as f32;
    let n = d.total_channels();
    let mut data = Vec::with_capacity(n * t.plane_len());
    let mut kept = t.channel_iter();
    for c in 0..n {
        if d.pruned().contains(c) {
            data.extend(std::iter::repeat_n(fill, t.plane_len()));
        } else {
            data.extend_from_slice(kept.next().expect("kept count checked above"));
        }
    }
    FeatureTensor::new(n, t.height(), t.width(), data)
}
