//! Property-based checks of the public invariants.

use proptest::prelude::*;

use crate::experiment::summarize;
use crate::outage::{
    beta_for_rate, code_rate, conditional_outage, h_coeffs, psi, OutageInputs,
};
use crate::propagation::{db_to_linear, linear_to_db, PropagationParams};
use crate::radio::{
    collision_probability, fractional_durations, InterferenceProfile, InterfererPeriodTerm,
};
use crate::topology::{build_sectors, BaseStation};

fn term() -> impl Strategy<Value = InterfererPeriodTerm> {
    (1e-3f64..3.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.5f64..4.0)
        .prop_map(|(omega, q, c, m)| InterfererPeriodTerm { omega, q, c, m })
}

fn profile() -> impl Strategy<Value = InterferenceProfile> {
    (1e-1f64..1e4, 1u32..=4, prop::collection::vec(term(), 0..12))
        .prop_map(|(gamma0, m0, terms)| InterferenceProfile { gamma0, m0, terms })
}

fn outage(p: &InterferenceProfile, beta: f64, hopping: bool) -> f64 {
    conditional_outage(OutageInputs {
        beta,
        profile: p,
        hopping,
    })
    .unwrap()
}

proptest! {
    #[test]
    fn durations_sum_to_one(frac in 0.0f64..1.0, slot in 1e-4f64..1e-2) {
        let c = fractional_durations(frac * slot, slot).unwrap();
        prop_assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(c.iter().all(|&x| (0.0..=0.5).contains(&x)));
    }

    #[test]
    fn psi_in_unit_interval(b in 0.0f64..1e4, o in 0.0f64..1e3, c in 0.0f64..=1.0, m in 0.5f64..5.0) {
        let p = psi(b, o, c, m).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn outage_is_a_probability(p in profile(), beta in 1e-3f64..100.0, hopping: bool) {
        let e = outage(&p, beta, hopping);
        prop_assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn outage_monotone_in_beta(p in profile(), beta in 1e-2f64..50.0, k in 1.0f64..4.0, hopping: bool) {
        prop_assert!(outage(&p, beta * k, hopping) >= outage(&p, beta, hopping) - 1e-12);
    }

    #[test]
    fn outage_monotone_in_noise(p in profile(), beta in 1e-2f64..50.0, k in 1.0f64..4.0, hopping: bool) {
        let mut q = p.clone();
        q.gamma0 /= k;
        prop_assert!(outage(&q, beta, hopping) >= outage(&p, beta, hopping) - 1e-12);
    }

    #[test]
    fn outage_monotone_in_each_omega(p in profile(), beta in 1e-2f64..50.0, k in 1.0f64..4.0, pick: prop::sample::Index) {
        prop_assume!(!p.terms.is_empty());
        let mut q = p.clone();
        q.terms[pick.index(p.terms.len())].omega *= k;
        prop_assert!(outage(&q, beta, true) >= outage(&p, beta, true) - 1e-12);
    }

    #[test]
    fn inert_terms_change_nothing(p in profile(), beta in 1e-2f64..50.0, extra in term()) {
        let mut q = p.clone();
        q.terms.push(InterfererPeriodTerm { q: 0.0, ..extra });
        q.terms.push(InterfererPeriodTerm { c: 0.0, ..extra });
        prop_assert_eq!(outage(&q, beta, true), outage(&p, beta, true));
    }

    #[test]
    fn h_coefficients_nonnegative(terms in prop::collection::vec(term(), 0..6), beta0 in 0.0f64..100.0) {
        let h = h_coeffs(6, &terms, beta0).unwrap();
        prop_assert!(h.iter().all(|&x| x >= 0.0));
        let h0: f64 = terms.iter().map(|t| 1.0 - t.q * (1.0 - psi(beta0, t.omega, t.c, t.m).unwrap().powf(t.m))).product();
        prop_assert!((h[0] - h0).abs() <= 1e-14 * h0.max(1e-300));
    }

    #[test]
    fn sectors_partition_the_circle(zeta in 1usize..64, offset in 0.0f64..std::f64::consts::TAU, theta in -20.0f64..20.0) {
        let st = [BaseStation { sector_offset: offset, ..BaseStation::new(1, 0.0, 0.0) }];
        let sectors = build_sectors(&st, zeta).unwrap();
        let t = theta.rem_euclid(std::f64::consts::TAU);
        prop_assert_eq!(sectors.iter().filter(|s| s.covers(t)).count(), 1);
    }

    #[test]
    fn propagation_bounds(d in 0.004f64..50.0) {
        let p = PropagationParams::default();
        let a = p.alpha(d).unwrap();
        prop_assert!(a >= p.alpha_min && a <= p.alpha_max);
        let m = p.nakagami_m(d).unwrap();
        prop_assert!(m >= p.m_min && m <= p.m_max);
        let f = p.path_loss(d).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0);
    }

    #[test]
    fn decibel_round_trip(x in -80.0f64..80.0) {
        prop_assert!((linear_to_db(db_to_linear(x)) - x).abs() < 1e-10);
    }

    #[test]
    fn rate_threshold_round_trip(r in 0.01f64..10.0, ls in 0.1f64..=1.0) {
        let b = beta_for_rate(r, ls).unwrap();
        prop_assert!((code_rate(b, ls).unwrap() - r).abs() < 1e-10);
    }

    #[test]
    fn collisions_bounded_under_capacity(load in 0u32..=10, act in 0.0f64..=1.0) {
        let q = collision_probability(load, 10, 10, 100, act).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn ase_identity_and_order_independence(eps in prop::collection::vec(0.0f64..=1.0, 1..50), rate in 0.1f64..8.0, seed: u64) {
        let s = summarize(&eps, 20.0, rate).unwrap();
        prop_assert_eq!(s.ase, 20.0 * rate * (1.0 - s.avg_outage));
        let mut shuffled = eps.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize);
        }
        let t = summarize(&shuffled, 20.0, rate).unwrap();
        prop_assert!((s.avg_outage - t.avg_outage).abs() <= 1e-14);
    }
}
