//! Single provider: revenue as a function of the opt-out cost and its maximizer.

use crate::decision::{shares_single, Offer, Shares};
use crate::error::{Error, Result};
use crate::population::ValuationDistribution;

/// Normalized revenues closer than this are treated as equal when picking an optimum.
pub const REVENUE_TIE_TOLERANCE: f64 = 1e-12;

/// Grid spacing of the brute-force oracle.
pub const ORACLE_STEP: f64 = 1e-4;

/// Coarse-to-fine refinement factor of `optimal_cost`.
const REFINE_FACTOR: i64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct MarketParams {
    pub revenue_rate: f64,
    pub gamma: f64,
    pub dist: ValuationDistribution,
    pub benefit: f64,
}

impl MarketParams {
    pub fn new(
        revenue_rate: f64,
        gamma: f64,
        dist: ValuationDistribution,
        benefit: f64,
    ) -> Result<Self> {
        check_revenue_rate("revenue_rate", revenue_rate)?;
        check_gamma("gamma", gamma)?;
        check_benefit("benefit", benefit)?;
        Ok(MarketParams {
            revenue_rate,
            gamma,
            dist,
            benefit,
        })
    }

    /// `max(b, quantile(1 - 1e-9))`; revenue is flat beyond it. Falls back to 1
    /// when both are zero.
    pub fn default_c_max(&self) -> f64 {
        let c_max = self.benefit.max(self.dist.upper_proxy());
        if c_max > 0.0 {
            c_max
        } else {
            1.0
        }
    }

    fn offer(&self, cost: Option<f64>) -> Offer {
        Offer {
            benefit: self.benefit,
            opt_out_cost: cost,
        }
    }

    /// Revenue per unit of `revenue_rate`.
    fn normalized_revenue(&self, cost: Option<f64>) -> f64 {
        let s = shares_single(&self.dist, &self.offer(cost));
        let p = s.providers[0];
        p.targeted + self.gamma * p.optout
    }
}

pub(crate) fn check_revenue_rate(field: &str, r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(field, format!("must be > 0, got {r}")));
    }
    Ok(())
}

pub(crate) fn check_gamma(field: &str, gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(
            field,
            format!("must lie in [0, 1], got {gamma}"),
        ));
    }
    Ok(())
}

pub(crate) fn check_benefit(field: &str, b: f64) -> Result<()> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid(field, format!("must be >= 0, got {b}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleSolution {
    /// `None`: offering no opt-out is optimal.
    pub c_star: Option<f64>,
    pub revenue_star: f64,
    pub baseline_no_optout: f64,
    pub shares_at_opt: Shares,
}

impl SingleSolution {
    pub fn optout_share(&self) -> f64 {
        self.shares_at_opt.providers[0].optout
    }
}

/// `r * (targeted + gamma * optout)`; `None` is the offer without an opt-out.
pub fn revenue(params: &MarketParams, cost: Option<f64>) -> f64 {
    params.revenue_rate * params.normalized_revenue(cost)
}

pub fn revenue_no_optout(params: &MarketParams) -> f64 {
    revenue(params, None)
}

/// Two-stage grid search: `{0, step, ..., c_max}` plus "no opt-out", then a grid of
/// spacing `step / 100` over `[c0 - step, c0 + step]` around the coarse winner `c0`.
///
/// The benefit `b` and every atom of the distribution that lie in `[0, c_max]` are
/// evaluated as well, since revenue jumps exactly there.
pub fn optimal_cost(params: &MarketParams, c_max: f64, step: f64) -> Result<SingleSolution> {
    if !(c_max.is_finite() && c_max > 0.0) {
        return Err(Error::invalid("c_max", format!("must be > 0, got {c_max}")));
    }
    if !(step > 0.0 && step <= c_max) {
        return Err(Error::invalid(
            "step",
            format!("must satisfy 0 < step <= c_max ({c_max}), got {step}"),
        ));
    }

    let mut candidates = uniform_grid(c_max, |k| k as f64 * step);
    candidates.extend(
        std::iter::once(params.benefit)
            .chain(params.dist.atoms())
            .filter(|&c| c <= c_max),
    );
    let mut evaluated = evaluate(params, candidates.into_iter().map(Some).chain([None]));

    if let Some(c0) = best(&evaluated).0 {
        let fine = step / REFINE_FACTOR as f64;
        let refined = (-REFINE_FACTOR..=REFINE_FACTOR)
            .map(|j| c0 + j as f64 * fine)
            .filter(|&c| (0.0..=c_max).contains(&c))
            .map(Some);
        evaluated.extend(evaluate(params, refined));
    }
    Ok(solution(params, best(&evaluated)))
}

/// Exhaustive grid `{k * 1e-4} ∩ [0, c_max]` plus "no opt-out", no refinement.
pub fn oracle_optimal_cost(params: &MarketParams, c_max: f64) -> Result<SingleSolution> {
    if !(c_max.is_finite() && c_max > 0.0) {
        return Err(Error::invalid("c_max", format!("must be > 0, got {c_max}")));
    }
    let grid = uniform_grid(c_max, |k| k as f64 / (1.0 / ORACLE_STEP).round());
    let evaluated = evaluate(params, grid.into_iter().map(Some).chain([None]));
    Ok(solution(params, best(&evaluated)))
}

/// `point(0), point(1), ...` up to `c_max`, closing with `c_max` itself when the
/// last point falls short of it.
fn uniform_grid(c_max: f64, point: impl Fn(u64) -> f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let c = point(k);
        if c > c_max * (1.0 + 1e-12) {
            break;
        }
        grid.push(c.min(c_max));
        k += 1;
    }
    if grid.last().is_some_and(|&last| last < c_max) {
        grid.push(c_max);
    }
    grid
}

fn evaluate(
    params: &MarketParams,
    costs: impl Iterator<Item = Option<f64>>,
) -> Vec<(Option<f64>, f64)> {
    costs.map(|c| (c, params.normalized_revenue(c))).collect()
}

/// Deterministic argmax: highest normalized revenue, ties (within tolerance) to the
/// smallest cost, and any offered cost before "no opt-out".
fn best(evaluated: &[(Option<f64>, f64)]) -> (Option<f64>, f64) {
    let top = evaluated
        .iter()
        .map(|e| e.1)
        .fold(f64::NEG_INFINITY, f64::max);
    evaluated
        .iter()
        .filter(|e| e.1 >= top - REVENUE_TIE_TOLERANCE)
        .min_by(|a, b| match (a.0, b.0) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        })
        .copied()
        .expect("candidate set always contains the no-opt-out offer")
}

fn solution(params: &MarketParams, (c_star, normalized): (Option<f64>, f64)) -> SingleSolution {
    SingleSolution {
        c_star,
        revenue_star: params.revenue_rate * normalized,
        baseline_no_optout: revenue_no_optout(params),
        shares_at_opt: shares_single(&params.dist, &params.offer(c_star)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tool {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToolChoice {
    pub chosen: Tool,
    pub revenue_low: f64,
    pub revenue_high: f64,
}

/// Picks the more profitable of two opt-out costs; ties go to the cheaper one.
pub fn choose_tool(params: &MarketParams, c_low: f64, c_high: f64) -> Result<ToolChoice> {
    if !(c_low >= 0.0 && c_low < c_high) {
        return Err(Error::invalid(
            "c_low/c_high",
            format!("need 0 <= c_low < c_high, got {c_low} and {c_high}"),
        ));
    }
    let low = params.normalized_revenue(Some(c_low));
    let high = params.normalized_revenue(Some(c_high));
    Ok(ToolChoice {
        chosen: if high > low + REVENUE_TIE_TOLERANCE {
            Tool::High
        } else {
            Tool::Low
        },
        revenue_low: params.revenue_rate * low,
        revenue_high: params.revenue_rate * high,
    })
}
