//! Distortion metrics and Bjøntegaard delta rate.

use crate::error::{Error, Result};
use crate::frame::SampleFrame;

/// Mean squared error between two equally sized sample sets.
pub fn mse<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "sample counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("mse of empty inputs"));
    }
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.into() - y.into();
            d * d
        })
        .sum();
    Ok(sum / a.len() as f64)
}

/// `10·log10(peak² / mse)`; `f64::INFINITY` when `mse` is zero.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// PSNR between two frames. Identical frames yield `f64::INFINITY`.
pub fn psnr(a: &SampleFrame, b: &SampleFrame, peak: u32) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::domain(format!(
            "frame sizes differ: {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(psnr_from_mse(mse(a.samples(), b.samples())?, peak as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    /// kbps
    pub rate: f64,
    pub quality: f64,
}

/// At least four points with strictly increasing, positive rates.
#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    points: Vec<RdPoint>,
}

impl RdCurve {
    pub const MIN_POINTS: usize = 4;

    pub fn new(points: Vec<RdPoint>) -> Result<Self> {
        if points.len() < Self::MIN_POINTS {
            return Err(Error::domain(format!(
                "an RD curve needs at least {} points, got {}",
                Self::MIN_POINTS,
                points.len()
            )));
        }
        if points
            .iter()
            .any(|p| !(p.rate.is_finite() && p.rate > 0.0) || !p.quality.is_finite())
        {
            return Err(Error::domain("rates must be positive and qualities finite"));
        }
        if points.windows(2).any(|w| w[0].rate >= w[1].rate) {
            return Err(Error::domain("rates must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    /// Same curve with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.points
                .iter()
                .map(|p| RdPoint {
                    rate: p.rate * factor,
                    quality: p.quality,
                })
                .collect(),
        )
    }

    fn quality_range(&self) -> (f64, f64) {
        self.points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.quality), hi.max(p.quality))
            })
    }
}

/// Least-squares cubic `log10(rate) ≈ p(quality)` in a normalized variable
/// `u = (q − center) / half_width`.
struct LogRateFit {
    center: f64,
    half_width: f64,
    coeffs: [f64; 4],
}

impl LogRateFit {
    fn new(curve: &RdCurve) -> Result<Self> {
        let (lo, hi) = curve.quality_range();
        let center = 0.5 * (lo + hi);
        let half_width = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
        let mut ata = [[0.0f64; 4]; 4];
        let mut atb = [0.0f64; 4];
        for p in curve.points() {
            let u = (p.quality - center) / half_width;
            let row = [1.0, u, u * u, u * u * u];
            let y = p.rate.log10();
            for i in 0..4 {
                atb[i] += row[i] * y;
                for j in 0..4 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let coeffs = solve4(ata, atb)
            .ok_or_else(|| Error::domain("RD curve qualities do not determine a cubic fit"))?;
        Ok(Self {
            center,
            half_width,
            coeffs,
        })
    }

    /// `∫_lo^hi p(q) dq`
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let antiderivative = |q: f64| {
            let u = (q - self.center) / self.half_width;
            let c = &self.coeffs;
            u * (c[0] + u * (c[1] / 2.0 + u * (c[2] / 3.0 + u * c[3] / 4.0)))
        };
        self.half_width * (antiderivative(hi) - antiderivative(lo))
    }
}

/// Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let pivot_row = a[col];
            let f = a[row][col] / pivot_row[col];
            for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Average rate difference (percent) of `test` relative to `anchor` at equal
/// quality. Negative means `test` needs less rate.
pub fn bd_rate(anchor: &RdCurve, test: &RdCurve) -> Result<f64> {
    let (alo, ahi) = anchor.quality_range();
    let (tlo, thi) = test.quality_range();
    let lo = alo.max(tlo);
    let hi = ahi.min(thi);
    if hi <= lo {
        return Err(Error::domain(format!(
            "quality ranges [{alo}, {ahi}] and [{tlo}, {thi}] do not overlap"
        )));
    }
    let fa = LogRateFit::new(anchor)?;
    let ft = LogRateFit::new(test)?;
    let avg = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
    Ok(100.0 * (10f64.powf(avg) - 1.0))
}
