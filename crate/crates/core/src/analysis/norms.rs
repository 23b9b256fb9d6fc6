use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::quadrature::composite_1d;
use crate::{Error, Result};

/// Monte Carlo sample count for finite-`p` norms when `d ≥ 3`.
pub const MC_SAMPLES: usize = 200_000;

/// Cap on the number of points of the `p = ∞` sampling grid.
const MAX_GRID_POINTS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    Inf,
    P(f64),
}

impl Norm {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Norm::Inf)
        } else if p.is_finite() && p >= 2.0 {
            Ok(Norm::P(p))
        } else {
            Err(Error::InvalidNorm(p))
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" => Ok(Norm::Inf),
            t => Norm::new(t.parse::<f64>().map_err(|_| Error::InvalidNorm(f64::NAN))?),
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            Norm::Inf => f64::INFINITY,
            Norm::P(p) => p,
        }
    }

    pub fn label(self) -> String {
        match self {
            Norm::Inf => "inf".into(),
            Norm::P(p) => format!("{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub value: f64,
    /// Standard error, for Monte Carlo estimates only.
    pub std_error: Option<f64>,
}

/// `‖f − g‖_{L^p([0,1]^d)}` at the resolution of a level-`n` grid.
///
/// - `p = ∞`: maximum over a dyadic grid of `2^{n+4} + 1` points per
///   dimension (coarsened for large `d` to stay under 2^26 points).
/// - finite `p`, `d ≤ 2`: composite Gauss–Legendre, 8 nodes on each of
///   `2^{n+2}` cells per dimension.
/// - finite `p`, `d ≥ 3`: Monte Carlo with [`MC_SAMPLES`] points from `seed`.
pub fn lp_error<F, G>(f: F, g: G, norm: Norm, d: usize, n: u32, seed: u64) -> Result<ErrorEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let diff = |x: &[f64]| (f(x) - g(x)).abs();
    match norm {
        Norm::Inf => {
            let mut k = n + 4;
            while k > 1 && ((1usize << k) + 1).saturating_pow(d as u32) > MAX_GRID_POINTS {
                k -= 1;
            }
            let m = (1usize << k) + 1;
            let step = 1.0 / (m - 1) as f64;
            let value = (0..m)
                .into_par_iter()
                .map(|first| {
                    let mut x = vec![0.0; d];
                    x[0] = first as f64 * step;
                    let mut worst = 0.0f64;
                    for_each_point(d - 1, m, |rest| {
                        for (slot, &r) in x[1..].iter_mut().zip(rest) {
                            *slot = r as f64 * step;
                        }
                        worst = worst.max(diff(&x));
                    });
                    worst
                })
                .reduce(|| 0.0, f64::max);
            Ok(ErrorEstimate { value, std_error: None })
        }
        Norm::P(p) if d <= 2 => {
            let rule = composite_1d(0.0, 1.0, 1 << (n + 2), 8);
            let partial: Vec<f64> = rule
                .par_iter()
                .map(|&(x0, w0)| {
                    let mut x = vec![x0; d];
                    if d == 1 {
                        return w0 * diff(&x).powf(p);
                    }
                    let mut acc = 0.0;
                    for &(x1, w1) in &rule {
                        x[1] = x1;
                        acc += w1 * diff(&x).powf(p);
                    }
                    w0 * acc
                })
                .collect();
            let integral: f64 = partial.iter().sum();
            Ok(ErrorEstimate {
                value: integral.powf(1.0 / p),
                std_error: None,
            })
        }
        Norm::P(p) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<f64> = (0..MC_SAMPLES * d).map(|_| rng.gen::<f64>()).collect();
            let samples: Vec<f64> = points.par_chunks(d).map(|x| diff(x).powf(p)).collect();
            let count = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / count;
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1.0);
            let se_mean = (var / count).sqrt();
            let value = mean.powf(1.0 / p);
            // delta method for the p-th root
            let std_error = if mean > 0.0 { se_mean * value / (p * mean) } else { 0.0 };
            Ok(ErrorEstimate {
                value,
                std_error: Some(std_error),
            })
        }
    }
}

/// Visit every point of `{0..m}^k`, last coordinate fastest.
fn for_each_point<F: FnMut(&[usize])>(k: usize, m: usize, mut visit: F) {
    let mut idx = vec![0usize; k];
    loop {
        visit(&idx);
        let mut j = k;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < m {
                break;
            }
            idx[j] = 0;
        }
    }
}
