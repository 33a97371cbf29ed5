//! Orthonormal 8×8 type-II DCT.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const N: usize = 8;
pub type Block = [[f64; N]; N];

fn basis() -> &'static Block {
    static BASIS: OnceLock<Block> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut m = [[0.0; N]; N];
        for (k, row) in m.iter_mut().enumerate() {
            let scale = if k == 0 {
                (1.0 / N as f64).sqrt()
            } else {
                (2.0 / N as f64).sqrt()
            };
            for (n, v) in row.iter_mut().enumerate() {
                *v = scale * ((2 * n + 1) as f64 * k as f64 * PI / (2 * N) as f64).cos();
            }
        }
        m
    })
}

/// `B · X · Bᵀ`
pub fn dct_block_forward(block: &Block) -> Block {
    let b = basis();
    let mut tmp = [[0.0; N]; N];
    for u in 0..N {
        for x in 0..N {
            tmp[u][x] = (0..N).map(|y| b[u][y] * block[y][x]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for u in 0..N {
        for v in 0..N {
            out[u][v] = (0..N).map(|x| tmp[u][x] * b[v][x]).sum();
        }
    }
    out
}

/// `Bᵀ · Y · B`
pub fn dct_block_inverse(coeffs: &Block) -> Block {
    let b = basis();
    let mut tmp = [[0.0; N]; N];
    for y in 0..N {
        for v in 0..N {
            tmp[y][v] = (0..N).map(|u| b[u][y] * coeffs[u][v]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for y in 0..N {
        for x in 0..N {
            out[y][x] = (0..N).map(|v| tmp[y][v] * b[v][x]).sum();
        }
    }
    out
}

/// Zigzag scan order as (row, col) pairs.
pub fn zigzag() -> &'static [(usize, usize); N * N] {
    static ORDER: OnceLock<[(usize, usize); N * N]> = OnceLock::new();
    ORDER.get_or_init(|| {
        let mut order = [(0, 0); N * N];
        let mut i = 0;
        for s in 0..(2 * N - 1) {
            let lo = s.saturating_sub(N - 1);
            let hi = s.min(N - 1);
            let rows: Vec<usize> = if s % 2 == 0 {
                (lo..=hi).rev().collect()
            } else {
                (lo..=hi).collect()
            };
            for r in rows {
                order[i] = (r, s - r);
                i += 1;
            }
        }
        order
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook quadruple-sum definition, independent of the basis matrix.
    #[allow(clippy::needless_range_loop)]
    fn naive_dct(x: &Block) -> Block {
        let mut out = [[0.0; N]; N];
        for u in 0..N {
            for v in 0..N {
                let cu = if u == 0 { (0.5f64).sqrt() } else { 1.0 };
                let cv = if v == 0 { (0.5f64).sqrt() } else { 1.0 };
                let mut s = 0.0;
                for (i, row) in x.iter().enumerate() {
                    for (j, &val) in row.iter().enumerate() {
                        s += val
                            * (((2 * i + 1) * u) as f64 * PI / 16.0).cos()
                            * (((2 * j + 1) * v) as f64 * PI / 16.0).cos();
                    }
                }
                out[u][v] = 0.25 * cu * cv * s;
            }
        }
        out
    }

    fn pseudo_random_block(seed: u64) -> Block {
        let mut state = seed;
        let mut b = [[0.0; N]; N];
        for row in b.iter_mut() {
            for v in row.iter_mut() {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                *v = ((state >> 33) as f64 / (1u64 << 31) as f64) * 510.0 - 255.0;
            }
        }
        b
    }

    #[test]
    fn constant_block_has_only_dc() {
        let c = 37.25;
        let out = dct_block_forward(&[[c; N]; N]);
        assert!((out[0][0] - 8.0 * c).abs() < 1e-9);
        for (u, row) in out.iter().enumerate() {
            for (v, &coef) in row.iter().enumerate() {
                if (u, v) != (0, 0) {
                    assert!(coef.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn zero_block() {
        assert_eq!(dct_block_forward(&[[0.0; N]; N]), [[0.0; N]; N]);
        assert_eq!(dct_block_inverse(&[[0.0; N]; N]), [[0.0; N]; N]);
    }

    #[test]
    fn matches_naive_definition() {
        for seed in 0..4 {
            let x = pseudo_random_block(seed);
            let fast = dct_block_forward(&x);
            let slow = naive_dct(&x);
            for u in 0..N {
                for v in 0..N {
                    assert!((fast[u][v] - slow[u][v]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for seed in 10..20 {
            let x = pseudo_random_block(seed);
            let y = dct_block_forward(&x);
            let back = dct_block_inverse(&y);
            let energy = |b: &Block| b.iter().flatten().map(|v| v * v).sum::<f64>();
            assert!((energy(&x) - energy(&y)).abs() < 1e-9 * energy(&x).max(1.0));
            for i in 0..N {
                for j in 0..N {
                    assert!((x[i][j] - back[i][j]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn zigzag_prefix() {
        let z = zigzag();
        assert_eq!(&z[..6], &[(0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2)]);
        assert_eq!(z[63], (7, 7));
        let mut seen = [[false; N]; N];
        for &(r, c) in z.iter() {
            assert!(!seen[r][c]);
            seen[r][c] = true;
        }
    }
}
