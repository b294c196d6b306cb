//! Comparative statics over gamma, benefit, or the exponential rate.

use std::fmt;
use std::str::FromStr;

use crate::duopoly::{payoff_matrix, pure_nash, CostGrid, DuopolyParams};
use crate::error::{Error, Result};
use crate::population::ValuationDistribution;
use crate::single_provider::{optimal_cost, MarketParams};

/// Slack allowed when deciding whether `step` divides a span.
const RANGE_SLACK: f64 = 1e-9;

/// Inclusive arithmetic progression `lo, lo + step, ...` ending at `hi` when `step`
/// divides `hi - lo` within 1e-9, otherwise at the last point below `hi`.
/// `lo > hi` yields an empty sequence.
pub fn value_range(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(
            "range",
            format!("bounds must be finite, got {lo}:{hi}"),
        ));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(
            "range",
            format!("step must be > 0, got {step}"),
        ));
    }
    if lo > hi {
        return Ok(Vec::new());
    }
    let span = (hi - lo) / step;
    let count = (span + RANGE_SLACK).floor() as u64;
    let mut values: Vec<f64> = (0..=count).map(|k| lo + k as f64 * step).collect();
    if (span - count as f64).abs() <= RANGE_SLACK {
        *values.last_mut().unwrap() = hi;
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Gamma,
    Benefit,
    /// Rate of an exponential valuation distribution.
    Rate,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Gamma => "gamma",
            Axis::Benefit => "benefit",
            Axis::Rate => "rate",
        }
    }

    fn check(self, value: f64) -> Result<()> {
        let ok = match self {
            Axis::Gamma => (0.0..=1.0).contains(&value),
            Axis::Benefit => value.is_finite() && value >= 0.0,
            Axis::Rate => value.is_finite() && value > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                self.name(),
                format!("axis value {value} is out of range"),
            ))
        }
    }

    fn set_rate(dist: &ValuationDistribution, rate: f64) -> Result<ValuationDistribution> {
        match dist {
            ValuationDistribution::Exponential { .. } => ValuationDistribution::exponential(rate),
            _ => Err(Error::invalid(
                "rate",
                "the rate axis needs an exponential valuation distribution",
            )),
        }
    }

    fn apply_single(self, base: &MarketParams, value: f64) -> Result<MarketParams> {
        let mut p = base.clone();
        match self {
            Axis::Gamma => p.gamma = value,
            Axis::Benefit => p.benefit = value,
            Axis::Rate => p.dist = Axis::set_rate(&p.dist, value)?,
        }
        MarketParams::new(p.revenue_rate, p.gamma, p.dist, p.benefit)
    }

    /// Gamma and benefit move for both providers.
    fn apply_duopoly(self, base: &DuopolyParams, value: f64) -> Result<DuopolyParams> {
        let mut p = base.clone();
        match self {
            Axis::Gamma => {
                p.provider1.gamma = value;
                p.provider2.gamma = value;
            }
            Axis::Benefit => {
                p.provider1.benefit = value;
                p.provider2.benefit = value;
            }
            Axis::Rate => p.dist = Axis::set_rate(&p.dist, value)?,
        }
        Ok(p)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(Axis::Gamma),
            "benefit" => Ok(Axis::Benefit),
            "rate" => Ok(Axis::Rate),
            other => Err(Error::invalid(
                "param",
                format!("unknown sweep axis {other:?} (expected gamma, benefit or rate)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepBase {
    Single(MarketParams),
    Duopoly(DuopolyParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// `None`: each row uses its own `MarketParams::default_c_max`.
    pub c_max: Option<f64>,
    pub step: f64,
    /// Strategy grid for duopoly sweeps.
    pub grid: Option<CostGrid>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            c_max: None,
            step: 0.01,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base: SweepBase,
    pub settings: SolverSettings,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid(
                "values",
                "sweep needs at least one axis value",
            ));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "values",
                "axis values must be strictly increasing",
            ));
        }
        self.values.iter().try_for_each(|&v| self.axis.check(v))
    }

    fn at<T>(&self, value: f64, f: impl FnOnce() -> Result<T>) -> Result<T> {
        f().map_err(|e| Error::Sweep {
            axis: self.axis.name(),
            value,
            source: Box::new(e),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub c_star: Option<f64>,
    pub revenue_star: f64,
    pub revenue_no_optout: f64,
    pub optout_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashPoint {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub u1: f64,
    pub u2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuopolyRow {
    pub axis_value: f64,
    pub equilibria: Vec<NashPoint>,
}

/// One `optimal_cost` solve per axis value, in axis order.
pub fn single_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let SweepBase::Single(base) = &spec.base else {
        return Err(Error::invalid(
            "base",
            "single sweep needs single-provider parameters",
        ));
    };
    spec.validate()?;
    spec.values
        .iter()
        .map(|&value| {
            spec.at(value, || {
                let params = spec.axis.apply_single(base, value)?;
                let c_max = spec
                    .settings
                    .c_max
                    .unwrap_or_else(|| params.default_c_max());
                let sol = optimal_cost(&params, c_max, spec.settings.step.min(c_max))?;
                Ok(SweepRow {
                    axis_value: value,
                    c_star: sol.c_star,
                    revenue_star: sol.revenue_star,
                    revenue_no_optout: sol.baseline_no_optout,
                    optout_share: sol.optout_share(),
                })
            })
        })
        .collect()
}

/// Pure equilibria of the cost game per axis value, in axis order.
pub fn duopoly_sweep(spec: &SweepSpec) -> Result<Vec<DuopolyRow>> {
    let SweepBase::Duopoly(base) = &spec.base else {
        return Err(Error::invalid(
            "base",
            "duopoly sweep needs duopoly parameters",
        ));
    };
    let grid = spec.settings.grid.as_ref().ok_or(Error::EmptyGrid)?;
    spec.validate()?;
    spec.values
        .iter()
        .map(|&value| {
            spec.at(value, || {
                let params = spec.axis.apply_duopoly(base, value)?;
                let matrix = payoff_matrix(&params, grid)?;
                let equilibria = pure_nash(&matrix)
                    .cells
                    .into_iter()
                    .map(|(i, j)| NashPoint {
                        c1: grid.strategy(i),
                        c2: grid.strategy(j),
                        u1: matrix.u1(i, j),
                        u2: matrix.u2(i, j),
                    })
                    .collect();
                Ok(DuopolyRow {
                    axis_value: value,
                    equilibria,
                })
            })
        })
        .collect()
}
