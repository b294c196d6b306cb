//! User choice among targeted use, opted-out use, and abstention.
//!
//! A user with privacy valuation `v` facing provider `i` gets `b_i - v` when
//! targeted, `b_i - c_i` when opted out (only if offered), and `0` when abstaining.
//! Ties resolve toward participation, then toward Targeted over OptOut.
//! Between providers, the pointwise rule (`user_choice`) picks the lower index
//! while the mass rule (`shares_duopoly`, `shares_monte_carlo`) splits 50/50.

use std::fmt;

use crate::error::{Error, Result};
use crate::population::ValuationDistribution;

/// One provider's posted terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Offer {
    pub benefit: f64,
    /// `None` means no opt-out is offered.
    pub opt_out_cost: Option<f64>,
}

impl Offer {
    pub fn new(benefit: f64, opt_out_cost: Option<f64>) -> Result<Self> {
        if !(benefit.is_finite() && benefit >= 0.0) {
            return Err(Error::invalid(
                "benefit",
                format!("must be >= 0, got {benefit}"),
            ));
        }
        if let Some(c) = opt_out_cost {
            if c.is_nan() || c < 0.0 {
                return Err(Error::invalid(
                    "opt_out_cost",
                    format!("must be >= 0, got {c}"),
                ));
            }
        }
        Ok(Offer {
            benefit,
            opt_out_cost,
        })
    }

    pub fn with_cost(benefit: f64, cost: f64) -> Result<Self> {
        Offer::new(benefit, Some(cost))
    }

    pub fn without_opt_out(benefit: f64) -> Result<Self> {
        Offer::new(benefit, None)
    }

    fn targeted_utility(&self, v: f64) -> f64 {
        self.benefit - v
    }

    fn optout_utility(&self) -> Option<f64> {
        self.opt_out_cost.map(|c| self.benefit - c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provider {
    One,
    Two,
}

impl Provider {
    pub fn index(self) -> usize {
        match self {
            Provider::One => 0,
            Provider::Two => 1,
        }
    }

    fn from_index(i: usize) -> Self {
        if i == 0 {
            Provider::One
        } else {
            Provider::Two
        }
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Targeted(Provider),
    OptOut(Provider),
    Abstain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Targeted,
    OptOut,
}

/// Outcome of the mass rule at a single valuation: nobody, or a kind of use at
/// one provider or split evenly over both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Allocation {
    Abstain,
    Single(Kind, usize),
    Split(Kind),
}

fn allocate(v: f64, offers: &[Offer]) -> Allocation {
    let mut best = f64::NEG_INFINITY;
    for o in offers {
        best = best.max(o.targeted_utility(v));
        if let Some(u) = o.optout_utility() {
            best = best.max(u);
        }
    }
    if best < 0.0 {
        return Allocation::Abstain;
    }
    let targeted: Vec<usize> = (0..offers.len())
        .filter(|&i| offers[i].targeted_utility(v) == best)
        .collect();
    let (kind, winners) = if targeted.is_empty() {
        let optout: Vec<usize> = (0..offers.len())
            .filter(|&i| offers[i].optout_utility() == Some(best))
            .collect();
        (Kind::OptOut, optout)
    } else {
        (Kind::Targeted, targeted)
    };
    match winners.as_slice() {
        [i] => Allocation::Single(kind, *i),
        _ => Allocation::Split(kind),
    }
}

fn check_offers(offers: &[Offer]) -> Result<()> {
    if offers.is_empty() || offers.len() > 2 {
        return Err(Error::OfferCount(offers.len()));
    }
    Ok(())
}

/// Pointwise choice of a single user; provider ties go to the lower index.
pub fn user_choice(v: f64, offers: &[Offer]) -> Result<Choice> {
    check_offers(offers)?;
    if v.is_nan() || v < 0.0 {
        return Err(Error::invalid(
            "v",
            format!("valuation must be >= 0, got {v}"),
        ));
    }
    Ok(match allocate(v, offers) {
        Allocation::Abstain => Choice::Abstain,
        Allocation::Single(Kind::Targeted, i) => Choice::Targeted(Provider::from_index(i)),
        Allocation::Single(Kind::OptOut, i) => Choice::OptOut(Provider::from_index(i)),
        Allocation::Split(Kind::Targeted) => Choice::Targeted(Provider::One),
        Allocation::Split(Kind::OptOut) => Choice::OptOut(Provider::One),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProviderShare {
    pub targeted: f64,
    pub optout: f64,
}

impl ProviderShare {
    pub fn total(&self) -> f64 {
        self.targeted + self.optout
    }
}

/// Partition of the population mass. `providers` has one entry per offer.
#[derive(Debug, Clone, PartialEq)]
pub struct Shares {
    pub providers: Vec<ProviderShare>,
    pub abstain: f64,
}

impl Shares {
    fn empty(n: usize) -> Self {
        Shares {
            providers: vec![ProviderShare::default(); n],
            abstain: 0.0,
        }
    }

    pub fn provider(&self, p: Provider) -> ProviderShare {
        self.providers.get(p.index()).copied().unwrap_or_default()
    }

    pub fn total(&self) -> f64 {
        self.providers.iter().map(ProviderShare::total).sum::<f64>() + self.abstain
    }

    /// Components in a fixed order: targeted/optout per provider, then abstain.
    pub fn components(&self) -> Vec<(String, f64)> {
        let mut out = Vec::with_capacity(2 * self.providers.len() + 1);
        for (i, p) in self.providers.iter().enumerate() {
            out.push((format!("targeted_{}", i + 1), p.targeted));
            out.push((format!("optout_{}", i + 1), p.optout));
        }
        out.push(("abstain".to_string(), self.abstain));
        out
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Shares) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|((_, a), (_, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn add(&mut self, alloc: Allocation, mass: f64) {
        match alloc {
            Allocation::Abstain => self.abstain += mass,
            Allocation::Single(kind, i) => self.bump(kind, i, mass),
            Allocation::Split(kind) => {
                self.bump(kind, 0, 0.5 * mass);
                self.bump(kind, 1, 0.5 * mass);
            }
        }
    }

    fn bump(&mut self, kind: Kind, i: usize, mass: f64) {
        let p = &mut self.providers[i];
        match kind {
            Kind::Targeted => p.targeted += mass,
            Kind::OptOut => p.optout += mass,
        }
    }
}

/// Exact shares for one provider, in closed form.
pub fn shares_single(dist: &ValuationDistribution, offer: &Offer) -> Shares {
    let b = offer.benefit;
    let share = match offer.opt_out_cost {
        Some(c) if c <= b => {
            let targeted = dist.prob_le(c);
            (targeted, 1.0 - targeted, 0.0)
        }
        _ => {
            let targeted = dist.prob_le(b);
            (targeted, 0.0, 1.0 - targeted)
        }
    };
    Shares {
        providers: vec![ProviderShare {
            targeted: share.0,
            optout: share.1,
        }],
        abstain: share.2,
    }
}

/// Exact shares for two providers.
pub fn shares_duopoly(dist: &ValuationDistribution, first: &Offer, second: &Offer) -> Shares {
    shares_exact(dist, &[*first, *second])
}

/// Exact shares for one or two offers by partitioning the valuation axis.
///
/// Breakpoints are every crossing of a targeted line `b_i - v` with a constant
/// utility (`b_j - c_j` or `0`) together with every atom of the distribution.
/// The winner is constant on each open interval between breakpoints; each
/// breakpoint carries its own atom mass and is decided pointwise.
pub fn shares_exact(dist: &ValuationDistribution, offers: &[Offer]) -> Shares {
    let mut cuts = vec![0.0];
    for o in offers {
        let mut levels = vec![0.0];
        levels.extend(offers.iter().filter_map(Offer::optout_utility));
        for level in levels {
            cuts.push(o.benefit - level);
        }
        // Same-provider crossing v = c, stated without rounding.
        if let Some(c) = o.opt_out_cost {
            cuts.push(c);
        }
    }
    cuts.extend(dist.atoms());
    cuts.retain(|x| x.is_finite());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut shares = Shares::empty(offers.len());
    let first = cuts[0];
    shares.add(allocate(first - 1.0, offers), dist.prob_lt(first));
    for (k, &x) in cuts.iter().enumerate() {
        shares.add(allocate(x, offers), dist.prob_le(x) - dist.prob_lt(x));
        let (interior, mass) = match cuts.get(k + 1) {
            Some(&next) => (0.5 * (x + next), dist.prob_lt(next) - dist.prob_le(x)),
            None => (x + 1.0, 1.0 - dist.prob_le(x)),
        };
        if mass > 0.0 {
            shares.add(allocate(interior, offers), mass);
        }
    }
    shares
}

/// Share frequencies over `sample(seed, n)`. Exact provider ties alternate,
/// starting with provider 1.
pub fn shares_monte_carlo(
    dist: &ValuationDistribution,
    offers: &[Offer],
    n: usize,
    seed: u64,
) -> Result<Shares> {
    check_offers(offers)?;
    if n == 0 {
        return Err(Error::invalid("n", "sample count must be >= 1"));
    }
    let mut counts = vec![[0u64; 2]; offers.len()];
    let mut abstain = 0u64;
    let mut next_split = 0usize;
    for v in dist.sample(seed, n) {
        let (kind, i) = match allocate(v, offers) {
            Allocation::Abstain => {
                abstain += 1;
                continue;
            }
            Allocation::Single(kind, i) => (kind, i),
            Allocation::Split(kind) => {
                let i = next_split;
                next_split ^= 1;
                (kind, i)
            }
        };
        counts[i][kind as usize] += 1;
    }
    let total = n as f64;
    Ok(Shares {
        providers: counts
            .iter()
            .map(|c| ProviderShare {
                targeted: c[0] as f64 / total,
                optout: c[1] as f64 / total,
            })
            .collect(),
        abstain: abstain as f64 / total,
    })
}
