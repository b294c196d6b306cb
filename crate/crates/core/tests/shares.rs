mod common;

use common::{random_dist, rng, uniform01};
use optout::{shares_duopoly, shares_exact, shares_monte_carlo, shares_single, Offer};
use proptest::prelude::*;
use rand::Rng;

fn arb_offer() -> impl Strategy<Value = Offer> {
    (0.0f64..2.0, proptest::option::of(0.0f64..2.0)).prop_map(|(b, c)| Offer::new(b, c).unwrap())
}

/// Offers whose numbers sit on a coarse lattice so that crossings coincide with
/// atoms and with each other.
fn lattice_offer() -> impl Strategy<Value = Offer> {
    (0u32..8, proptest::option::of(0u32..8))
        .prop_map(|(b, c)| Offer::new(b as f64 * 0.25, c.map(|c| c as f64 * 0.25)).unwrap())
}

proptest! {
    #[test]
    fn masses_sum_to_one(
        family in 0usize..4,
        seed in any::<u64>(),
        first in arb_offer(),
        second in lattice_offer(),
    ) {
        let dist = random_dist(&mut rng(seed), family);
        for s in [
            shares_single(&dist, &first),
            shares_duopoly(&dist, &first, &second),
            shares_duopoly(&dist, &second, &second),
        ] {
            prop_assert!((s.total() - 1.0).abs() <= 1e-12, "{s:?}");
            prop_assert!(s.components().iter().all(|(_, m)| (-1e-15..=1.0 + 1e-15).contains(m)));
        }
    }

    #[test]
    fn identical_offers_are_symmetric(
        family in 0usize..4,
        seed in any::<u64>(),
        offer in lattice_offer(),
    ) {
        let dist = random_dist(&mut rng(seed), family);
        let s = shares_duopoly(&dist, &offer, &offer);
        prop_assert_eq!(s.providers[0], s.providers[1]);
    }

    #[test]
    fn unreachable_opt_out_equals_no_opt_out(
        family in 0usize..4,
        seed in any::<u64>(),
        b in 0.0f64..2.0,
        extra in 1e-9f64..1.0,
    ) {
        let dist = random_dist(&mut rng(seed), family);
        prop_assert_eq!(
            shares_single(&dist, &Offer::with_cost(b, b + extra).unwrap()),
            shares_single(&dist, &Offer::without_opt_out(b).unwrap())
        );
    }

    #[test]
    fn partition_matches_closed_form_for_one_offer(
        family in 0usize..4,
        seed in any::<u64>(),
        offer in lattice_offer(),
    ) {
        let dist = random_dist(&mut rng(seed), family);
        let closed = shares_single(&dist, &offer);
        let general = shares_exact(&dist, &[offer]);
        prop_assert!(closed.max_abs_diff(&general) <= 1e-12);
    }

    #[test]
    fn swapping_offers_swaps_shares(
        family in 0usize..4,
        seed in any::<u64>(),
        first in lattice_offer(),
        second in lattice_offer(),
    ) {
        let dist = random_dist(&mut rng(seed), family);
        let a = shares_duopoly(&dist, &first, &second);
        let b = shares_duopoly(&dist, &second, &first);
        prop_assert!((a.providers[0].targeted - b.providers[1].targeted).abs() <= 1e-12);
        prop_assert!((a.providers[0].optout - b.providers[1].optout).abs() <= 1e-12);
        prop_assert!((a.abstain - b.abstain).abs() <= 1e-12);
    }
}

#[test]
fn zero_benefit_rival() {
    let s = shares_duopoly(
        &uniform01(),
        &Offer::with_cost(1.0, 0.5).unwrap(),
        &Offer::without_opt_out(0.0).unwrap(),
    );
    assert_eq!(s.providers[1].total(), 0.0);
    assert!((s.providers[0].total() - 1.0).abs() <= 1e-12);
}

#[test]
fn monte_carlo_is_deterministic() {
    let offers = [
        Offer::with_cost(1.0, 0.3).unwrap(),
        Offer::with_cost(0.8, 0.1).unwrap(),
    ];
    let a = shares_monte_carlo(&uniform01(), &offers, 10_000, 9).unwrap();
    let b = shares_monte_carlo(&uniform01(), &offers, 10_000, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn monte_carlo_golden() {
    let s = shares_monte_carlo(
        &uniform01(),
        &[Offer::with_cost(1.0, 0.4).unwrap()],
        100_000,
        7,
    )
    .unwrap();
    assert_eq!(s.providers[0].targeted, 0.3989);
    assert!((s.providers[0].targeted - 0.4).abs() <= 0.01);
}

#[test]
fn monte_carlo_agrees_with_exact_on_random_scenarios() {
    let mut r = rng(2024);
    for k in 0..24 {
        let dist = random_dist(&mut r, k);
        let mut offers =
            vec![Offer::new(r.gen_range(0.0..2.0), Some(r.gen_range(0.0..2.0))).unwrap()];
        if k % 2 == 1 {
            let cost = if r.gen_bool(0.3) {
                None
            } else {
                Some(r.gen_range(0.0..2.0))
            };
            offers.push(Offer::new(r.gen_range(0.0..2.0), cost).unwrap());
        }
        let exact = shares_exact(&dist, &offers);
        let mc = shares_monte_carlo(&dist, &offers, 100_000, k as u64).unwrap();
        let diff = exact.max_abs_diff(&mc);
        assert!(diff <= 0.01, "{dist:?} {offers:?}: {diff}");
    }
}
