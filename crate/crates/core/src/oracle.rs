//! Monte-Carlo reference sets and error metrics.
//!
//! Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so the
//! result does not depend on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Hyperrect;
use crate::model::SystemSpec;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    Volume,
    RadiusSum,
}

impl ErrorMetric {
    pub fn measure(self, h: &Hyperrect) -> f64 {
        match self {
            ErrorMetric::Volume => h.volume(),
            ErrorMetric::RadiusSum => h.radius_sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub e_total_volume: f64,
    pub e_total_radius: f64,
    pub per_step_e: Vec<f64>,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl ErrorReport {
    /// Totals under both metrics; per-step values use the volume metric.
    pub fn new(sets: &[Hyperrect], hulls: &[Hyperrect], samples: usize, seed: u64) -> Result<Self> {
        let per_step_e = sets
            .iter()
            .zip(hulls)
            .map(|(s, u)| error_per_step(s, u, ErrorMetric::Volume))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            e_total_volume: error_total(sets, hulls, ErrorMetric::Volume)?,
            e_total_radius: error_total(sets, hulls, ErrorMetric::RadiusSum)?,
            per_step_e,
            n: sets.len(),
            samples,
            seed,
        })
    }
}

fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

fn sample_point(rng: &mut ChaCha8Rng, x0: &Hyperrect) -> Vec<f64> {
    x0.lo()
        .iter()
        .zip(x0.hi())
        .map(|(&l, &h)| if l < h { rng.gen_range(l..=h) } else { l })
        .collect()
}

/// The closed-loop trajectory of sample `i`: states at times `1..=n`.
pub fn trajectory(sys: &SystemSpec, x0: &Hyperrect, n: usize, seed: u64, i: usize) -> Result<Vec<Vec<f64>>> {
    let mut rng = sample_rng(seed, i);
    let mut x = sample_point(&mut rng, x0);
    let mut out = Vec::with_capacity(n);
    for step in 1..=n {
        x = sys.closed_loop_step(&x).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFiniteTrajectory { sample: i, step },
            other => other,
        })?;
        out.push(x.clone());
    }
    Ok(out)
}

#[derive(Clone)]
struct Bounds {
    lo: Vec<Vec<f64>>,
    hi: Vec<Vec<f64>>,
}

impl Bounds {
    fn empty(n: usize, d: usize) -> Self {
        Self {
            lo: vec![vec![f64::INFINITY; d]; n],
            hi: vec![vec![f64::NEG_INFINITY; d]; n],
        }
    }

    fn add(mut self, traj: &[Vec<f64>]) -> Self {
        for (t, x) in traj.iter().enumerate() {
            for (i, &v) in x.iter().enumerate() {
                self.lo[t][i] = self.lo[t][i].min(v);
                self.hi[t][i] = self.hi[t][i].max(v);
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for t in 0..self.lo.len() {
            for i in 0..self.lo[t].len() {
                self.lo[t][i] = self.lo[t][i].min(other.lo[t][i]);
                self.hi[t][i] = self.hi[t][i].max(other.hi[t][i]);
            }
        }
        self
    }
}

/// Per-step hulls of `samples` trajectories started uniformly in `x0`.
pub fn sample_hulls(sys: &SystemSpec, x0: &Hyperrect, n: usize, samples: usize, seed: u64) -> Result<Vec<Hyperrect>> {
    if samples == 0 {
        return Err(Error::EmptyPointSet);
    }
    if x0.dim() != sys.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.state_dim(),
            found: x0.dim(),
        });
    }
    let d = sys.state_dim();
    let bounds = (0..samples)
        .into_par_iter()
        .try_fold(
            || Bounds::empty(n, d),
            |acc, i| trajectory(sys, x0, n, seed, i).map(|tr| acc.add(&tr)),
        )
        .try_reduce(|| Bounds::empty(n, d), |a, b| Ok(a.merge(b)))?;
    bounds
        .lo
        .into_iter()
        .zip(bounds.hi)
        .map(|(lo, hi)| Hyperrect::new(lo, hi))
        .collect()
}

/// `sum_t m(sets_t) / sum_t m(hulls_t)`.
pub fn error_total(sets: &[Hyperrect], hulls: &[Hyperrect], metric: ErrorMetric) -> Result<f64> {
    if sets.len() != hulls.len() {
        return Err(Error::DimensionMismatch {
            expected: hulls.len(),
            found: sets.len(),
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (s, u) in sets.iter().zip(hulls) {
        if s.dim() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: s.dim(),
            });
        }
        num += metric.measure(s);
        den += metric.measure(u);
    }
    if den <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    Ok(num / den)
}

pub fn error_per_step(set: &Hyperrect, hull: &Hyperrect, metric: ErrorMetric) -> Result<f64> {
    error_total(std::slice::from_ref(set), std::slice::from_ref(hull), metric)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    /// Time step, 1-based.
    pub t: usize,
    pub point: Vec<f64>,
}

/// Every `(sample, t)` whose trajectory point lies outside `sets[t - 1]`.
/// Trajectories that leave the finite range are reported at the step they
/// do so, with an empty point.
pub fn audit_soundness(sys: &SystemSpec, x0: &Hyperrect, sets: &[Hyperrect], samples: usize, seed: u64) -> Vec<Violation> {
    let n = sets.len();
    let mut found: Vec<Violation> = (0..samples)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut v = Vec::new();
            match trajectory(sys, x0, n, seed, i) {
                Ok(traj) => {
                    for (t, (x, s)) in traj.into_iter().zip(sets).enumerate() {
                        if !s.contains(&x).unwrap_or(false) {
                            v.push(Violation { sample: i, t: t + 1, point: x });
                        }
                    }
                }
                Err(Error::NonFiniteTrajectory { sample, step }) => v.push(Violation {
                    sample,
                    t: step,
                    point: Vec::new(),
                }),
                Err(_) => v.push(Violation {
                    sample: i,
                    t: 0,
                    point: Vec::new(),
                }),
            }
            v
        })
        .collect();
    found.sort_by_key(|v| (v.sample, v.t));
    found
}
