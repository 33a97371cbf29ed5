use fcm_core::metrics::{mse, psnr_from_mse};
use fcm_core::{compute_global_stats, FeatureTensor, TensorGroup};
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
pub struct Report {
    pub stream_bytes: usize,
    pub tensors: Vec<TensorReport>,
}

#[derive(Serialize)]
pub struct TensorReport {
    label: String,
    shape: [usize; 3],
    mse: f64,
    /// dB against the original tensor's dynamic range; "inf" when exact
    #[serde(serialize_with = "finite_or_inf")]
    psnr: f64,
    peak: f64,
    stats_error: StatsError,
}

#[derive(Serialize)]
struct StatsError {
    mu: f64,
    sigma: f64,
}

fn finite_or_inf<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn range(t: &FeatureTensor) -> f64 {
    let (lo, hi) = t
        .data()
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    hi as f64 - lo as f64
}

impl Report {
    pub fn new(
        original: &TensorGroup,
        decoded: &TensorGroup,
        stream_bytes: usize,
    ) -> Result<Self, CliError> {
        let tensors = original
            .entries()
            .iter()
            .zip(decoded.tensors())
            .map(|((label, a), b)| {
                let mse = mse(a.data(), b.data())?;
                let (sa, sb) = (compute_global_stats(a), compute_global_stats(b));
                let (c, h, w) = a.shape();
                let peak = range(a);
                Ok(TensorReport {
                    label: label.clone(),
                    shape: [c, h, w],
                    mse,
                    psnr: psnr_from_mse(mse, peak),
                    peak,
                    stats_error: StatsError {
                        mu: (sb.mu - sa.mu).abs(),
                        sigma: (sb.sigma - sa.sigma).abs(),
                    },
                })
            })
            .collect::<Result<_, fcm_core::Error>>()?;
        Ok(Self {
            stream_bytes,
            tensors,
        })
    }
}
