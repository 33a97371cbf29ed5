//! Lexicographic combinatorial rank (LCR) coding of pruned-channel sets.
//!
//! A `k`-subset of `{0, …, N−1}` is identified by its zero-based position in
//! the lexicographic enumeration of all `k`-subsets. Ranks for realistic
//! channel counts (`C(256, 128) ≈ 5.8·10⁷⁵`) overflow every native integer, so
//! all arithmetic here is exact big-integer arithmetic.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, LcrError, Result};

/// Strictly increasing set of channel indices drawn from `0..total_channels`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelIndexSet {
    indices: Vec<usize>,
    total_channels: usize,
}

impl ChannelIndexSet {
    pub fn new(indices: Vec<usize>, total_channels: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("channel indices must be strictly increasing"));
        }
        if let Some(&last) = indices.last() {
            if last >= total_channels {
                return Err(Error::domain(format!(
                    "channel index {last} out of range for {total_channels} channels"
                )));
            }
        }
        Ok(Self {
            indices,
            total_channels,
        })
    }

    pub fn empty(total_channels: usize) -> Self {
        Self {
            indices: Vec::new(),
            total_channels,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn total_channels(&self) -> usize {
        self.total_channels
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// `(k, rank)` pair identifying a `k`-subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LcrCode {
    pub k: usize,
    pub rank: BigUint,
}

/// Exact binomial coefficient; zero outside `0 ≤ r ≤ n`.
pub fn binomial(n: u64, r: i64) -> BigUint {
    if r < 0 || r as u64 > n {
        return BigUint::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigUint::one();
    // acc = C(n - r + i, i) after step i, always an integer
    for i in 1..=r {
        acc *= n - r + i;
        acc /= i;
    }
    acc
}

fn choose(n: usize, r: usize) -> BigUint {
    binomial(n as u64, r as i64)
}

/// Rank of `set` among all `k`-subsets of `{0..N}` in lexicographic order.
pub fn lcr_encode(set: &ChannelIndexSet) -> LcrCode {
    let n = set.total_channels;
    let k = set.len();
    let mut rank = BigUint::zero();
    let mut prev: Option<usize> = None;
    for (t, &it) in set.indices.iter().enumerate() {
        let start = prev.map_or(0, |p| p + 1);
        // every skipped j fixes position t to j; the remaining k-t-1 picks
        // come from the N-j-1 indices above it
        for j in start..it {
            rank += choose(n - j - 1, k - t - 1);
        }
        prev = Some(it);
    }
    LcrCode { k, rank }
}

/// Inverse of [`lcr_encode`].
pub fn lcr_decode(code: &LcrCode, total_channels: usize) -> Result<ChannelIndexSet, LcrError> {
    let n = total_channels;
    let k = code.k;
    if k > n {
        return Err(LcrError::TooManyChannels { n, k });
    }
    if code.rank >= choose(n, k) {
        return Err(LcrError::RankOutOfRange { n, k });
    }
    let mut temp = code.rank.clone();
    let mut x = 0usize;
    let mut indices = Vec::with_capacity(k);
    for t in 0..k {
        loop {
            let step = choose(n - x - 1, k - t - 1);
            if step > temp {
                break;
            }
            temp -= step;
            x += 1;
        }
        indices.push(x);
        x += 1;
    }
    Ok(ChannelIndexSet {
        indices,
        total_channels: n,
    })
}

/// Number of `k`-subsets of `N` channels, `C(N, k)`.
pub fn subset_count(total_channels: usize, k: usize) -> BigUint {
    choose(total_channels, k)
}
