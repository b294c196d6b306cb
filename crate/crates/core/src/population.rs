//! Privacy-valuation distributions.
//!
//! Every family exposes an exact CDF (`prob_le`), its left limit (`prob_lt`, which
//! isolates atoms), a generalized inverse, and seeded inverse-transform sampling.
//!
//! # Sampling stream
//!
//! `sample(seed, n)` draws from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Each uniform is `(next_u64() >> 11) * 2^-53`, a value in
//! `[0, 1)`, pushed through `quantile`. ChaCha output is specified independently of
//! platform and word size, so the stream is reproducible everywhere.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total weight of an empirical distribution.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Population law of the privacy valuation `v >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawDistribution")]
pub enum ValuationDistribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    #[serde(rename = "pointmass")]
    PointMass {
        at: f64,
    },
    Empirical(Empirical),
}

/// Finitely supported distribution. Values are strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Empirical {
    points: Vec<(f64, f64)>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl Empirical {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid(
                "points",
                "empirical distribution needs at least one point",
            ));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, &(value, weight)) in points.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::invalid(
                    "points",
                    format!("value #{i} must be finite and >= 0, got {value}"),
                ));
            }
            if value <= prev {
                return Err(Error::invalid(
                    "points",
                    format!("values must be strictly increasing (#{i} = {value} after {prev})"),
                ));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::invalid(
                    "points",
                    format!("weight #{i} must be > 0, got {weight}"),
                ));
            }
            prev = value;
        }
        let cumulative: Vec<f64> = points
            .iter()
            .scan(0.0, |acc, &(_, w)| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().unwrap();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::invalid(
                "points",
                format!("weights must sum to 1, got {total}"),
            ));
        }
        Ok(Empirical { points, cumulative })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Mass strictly before index `k` in the sorted support; index `len` is all of it.
    fn mass_before(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else if k >= self.points.len() {
            1.0
        } else {
            self.cumulative[k - 1]
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawDistribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    #[serde(rename = "pointmass")]
    PointMass {
        at: f64,
    },
    Empirical {
        points: Vec<(f64, f64)>,
    },
}

impl TryFrom<RawDistribution> for ValuationDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Uniform { lo, hi } => ValuationDistribution::uniform(lo, hi),
            RawDistribution::Exponential { rate } => ValuationDistribution::exponential(rate),
            RawDistribution::PointMass { at } => ValuationDistribution::point_mass(at),
            RawDistribution::Empirical { points } => ValuationDistribution::empirical(points),
        }
    }
}

impl ValuationDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::invalid(
                "lo/hi",
                format!("uniform needs 0 <= lo < hi, got lo={lo} hi={hi}"),
            ));
        }
        Ok(ValuationDistribution::Uniform { lo, hi })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("rate", format!("must be > 0, got {rate}")));
        }
        Ok(ValuationDistribution::Exponential { rate })
    }

    pub fn point_mass(at: f64) -> Result<Self> {
        if !(at.is_finite() && at >= 0.0) {
            return Err(Error::invalid("at", format!("must be >= 0, got {at}")));
        }
        Ok(ValuationDistribution::PointMass { at })
    }

    pub fn empirical(points: Vec<(f64, f64)>) -> Result<Self> {
        Empirical::new(points).map(ValuationDistribution::Empirical)
    }

    /// `P[v <= x]`.
    pub fn prob_le(&self, x: f64) -> f64 {
        match self {
            ValuationDistribution::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ValuationDistribution::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            ValuationDistribution::PointMass { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            ValuationDistribution::Empirical(e) => {
                e.mass_before(e.points.partition_point(|&(v, _)| v <= x))
            }
        }
    }

    /// `P[v < x]`, the left limit of the CDF.
    pub fn prob_lt(&self, x: f64) -> f64 {
        match self {
            ValuationDistribution::PointMass { at } => {
                if x > *at {
                    1.0
                } else {
                    0.0
                }
            }
            ValuationDistribution::Empirical(e) => {
                e.mass_before(e.points.partition_point(|&(v, _)| v < x))
            }
            _ => self.prob_le(x),
        }
    }

    /// Mass of the atom at `x` (zero for continuous families).
    pub fn atom_mass(&self, x: f64) -> f64 {
        self.prob_le(x) - self.prob_lt(x)
    }

    /// Locations of all atoms, ascending.
    pub fn atoms(&self) -> Vec<f64> {
        match self {
            ValuationDistribution::PointMass { at } => vec![*at],
            ValuationDistribution::Empirical(e) => e.points.iter().map(|&(v, _)| v).collect(),
            _ => Vec::new(),
        }
    }

    /// Generalized inverse `inf{x : prob_le(x) >= p}`, with `p = 0` mapped to the
    /// lower end of the support.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: f64) -> f64 {
        match self {
            ValuationDistribution::Uniform { lo, hi } => lo + p * (hi - lo),
            ValuationDistribution::Exponential { rate } => -(-p).ln_1p() / rate,
            ValuationDistribution::PointMass { at } => *at,
            ValuationDistribution::Empirical(e) => {
                let k = e.cumulative.partition_point(|&c| c < p);
                e.points[k.min(e.points.len() - 1)].0
            }
        }
    }

    /// `n` draws by inverse-transform sampling; see the module docs for the stream.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| self.quantile_unchecked(unit_uniform(&mut rng)))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        match self {
            ValuationDistribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            ValuationDistribution::Exponential { rate } => 1.0 / rate,
            ValuationDistribution::PointMass { at } => *at,
            ValuationDistribution::Empirical(e) => e.points.iter().map(|&(v, w)| v * w).sum(),
        }
    }

    /// A point beyond which essentially no mass remains: `quantile(1 - 1e-9)`.
    pub fn upper_proxy(&self) -> f64 {
        self.quantile_unchecked(1.0 - 1e-9)
    }
}

/// 53-bit uniform in `[0, 1)`.
fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
