#![allow(dead_code)]

use optout::{DuopolyParams, MarketParams, ProviderParams, ValuationDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Family chosen by `family % 4`: uniform, exponential, point mass, empirical.
pub fn random_dist(rng: &mut ChaCha8Rng, family: usize) -> ValuationDistribution {
    match family % 4 {
        0 => {
            let lo = rng.gen_range(0.0..0.5);
            ValuationDistribution::uniform(lo, lo + rng.gen_range(0.1..1.5)).unwrap()
        }
        1 => ValuationDistribution::exponential(rng.gen_range(0.5..5.0)).unwrap(),
        2 => ValuationDistribution::point_mass(rng.gen_range(0.0..1.5)).unwrap(),
        _ => {
            let n = rng.gen_range(2..=6);
            let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            let weights: Vec<f64> = values.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            ValuationDistribution::empirical(
                values
                    .into_iter()
                    .zip(weights.into_iter().map(|w| w / total))
                    .collect(),
            )
            .unwrap()
        }
    }
}

pub fn random_market(rng: &mut ChaCha8Rng, family: usize) -> MarketParams {
    let dist = random_dist(rng, family);
    MarketParams::new(
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.0..=1.0),
        dist,
        rng.gen_range(0.0..2.0),
    )
    .unwrap()
}

pub fn random_provider(rng: &mut ChaCha8Rng) -> ProviderParams {
    ProviderParams::new(
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.0..=1.0),
        rng.gen_range(0.0..2.0),
    )
    .unwrap()
}

pub fn random_symmetric_duopoly(rng: &mut ChaCha8Rng, family: usize) -> DuopolyParams {
    let dist = random_dist(rng, family);
    DuopolyParams::symmetric(random_provider(rng), dist)
}

pub fn uniform01() -> ValuationDistribution {
    ValuationDistribution::uniform(0.0, 1.0).unwrap()
}

/// Kolmogorov-Smirnov distance between the sample's empirical CDF and the
/// distribution, checking both one-sided limits at every sample point.
pub fn ks_distance(dist: &ValuationDistribution, sample: &[f64]) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at_or_below = j as f64 / n;
        worst = worst
            .max((below - dist.prob_lt(x)).abs())
            .max((at_or_below - dist.prob_le(x)).abs());
        i = j;
    }
    worst
}
