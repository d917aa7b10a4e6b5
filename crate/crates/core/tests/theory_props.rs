use coopspread::model::CoopParams;
use coopspread::theory::{
    classify_regime, coop_lower_speed, gamma_roots, r2_upper_speed, wave_verdict, RegimeTag,
    WaveExistence,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coop_params() -> impl Strategy<Value = CoopParams> {
    (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0, 0.0f64..0.95, 0.0f64..0.95).prop_map(
        |(d1, d2, r1, r2, b1, b2)| CoopParams { d1, d2, r1, r2, b1, b2 },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gamma_roots_solve_the_quadratic(d in 0.05f64..5.0, r in 0.05f64..5.0, excess in 1e-6f64..5.0) {
        let c = 2.0 * (d * r).sqrt() + excess;
        let (g1, g2) = gamma_roots(d, r, c).expect("real roots above threshold");
        prop_assert!(g1 <= g2);
        for g in [g1, g2] {
            prop_assert!((d * g * g - c * g + r).abs() < 1e-10);
        }
        prop_assert!((g1 * g2 - r / d).abs() < 1e-10);
        prop_assert!((g1 + g2 - c / d).abs() < 1e-10);
    }

    #[test]
    fn no_real_roots_below_threshold(d in 0.05f64..5.0, r in 0.05f64..5.0, frac in 0.0f64..0.999) {
        let c = frac * 2.0 * (d * r).sqrt();
        prop_assert!(gamma_roots(d, r, c).is_none());
    }

    #[test]
    fn cooperative_speed_never_below_isolated_u2(p in coop_params()) {
        if let Ok(c) = coop_lower_speed(&p) {
            prop_assert!(c >= 2.0 * (p.d2 * p.r2).sqrt() * (1.0 - 1e-15));
        } else {
            prop_assert!(p.d1 * p.r1 <= p.d2 * p.r2);
        }
    }

    #[test]
    fn dominated_u2_bound_lies_between_isolated_and_cooperative(p in coop_params()) {
        if let Some(u) = r2_upper_speed(&p) {
            prop_assert!(u >= 2.0 * (p.d2 * p.r2).sqrt());
            // 1 + b2 k1 = k2, so the linearization at (k1, 0) gives the same value.
            prop_assert!(u <= 2.0 * (p.d2 * p.r2 * (1.0 + p.b2 * p.coexistence().0)).sqrt() * (1.0 + 1e-12));
        }
    }
}

/// Once a wave exists at some c, no faster c is ruled out.
#[test]
fn verdict_is_monotone_in_c() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = CoopParams {
            d1: rng.gen_range(0.2..3.0),
            d2: rng.gen_range(0.2..3.0),
            r1: rng.gen_range(0.2..3.0),
            r2: rng.gen_range(0.2..3.0),
            b1: rng.gen_range(0.0..0.9),
            b2: rng.gen_range(0.0..0.9),
        };
        let mut seen_exists = false;
        for j in 0..200 {
            let c = 0.05 * (j + 1) as f64;
            let v = wave_verdict(&p, c).verdict;
            if seen_exists {
                assert_ne!(v, WaveExistence::NotExists, "{p:?} at c={c}");
            }
            seen_exists |= v == WaveExistence::Exists;
        }
    }
}

fn raw_regime(p: &CoopParams) -> RegimeTag {
    let (_, k2) = p.coexistence();
    if p.d1 == p.d2 && p.r1 == p.r2 {
        return RegimeTag::RemarkR1;
    }
    if p.d1 * p.r1 > p.d2 * p.r2 * k2 {
        return RegimeTag::RemarkR2;
    }
    let lo = 2.0 * (p.d2 * p.r2).sqrt();
    let mid = 2.0 * (p.d1 * p.r1).sqrt();
    let hi = 2.0 * (p.d2 * p.r2 * (1.0 + p.b2)).sqrt();
    if p.d1 == p.d2 && lo < mid && mid <= hi {
        return RegimeTag::RemarkR3;
    }
    if p.d1 * p.r1 > p.d2 * p.r2 {
        RegimeTag::TheoremOnly
    } else {
        RegimeTag::Outside
    }
}

#[test]
fn regime_matches_raw_inequalities() {
    // Coarse value sets make the equality conditions actually occur.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let choices = [0.5, 0.8, 1.0, 1.2, 2.0, 4.0];
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..1000 {
        let mut pick = || choices[rng.gen_range(0..choices.len())];
        let (d1, d2, r1, r2) = (pick(), pick(), pick(), pick());
        let p = CoopParams { d1, d2, r1, r2, b1: rng.gen_range(0.0..0.95), b2: rng.gen_range(0.0..0.95) };
        let tag = classify_regime(&p);
        assert_eq!(tag, raw_regime(&p), "{p:?}");
        *counts.entry(tag.as_str()).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), 5, "every regime should be drawn: {counts:?}");
}

#[test]
fn nonexistence_exactly_below_isolated_speed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let p = CoopParams {
            d1: rng.gen_range(0.2..3.0),
            d2: rng.gen_range(0.2..3.0),
            r1: rng.gen_range(0.2..3.0),
            r2: rng.gen_range(0.2..3.0),
            b1: rng.gen_range(0.0..0.9),
            b2: rng.gen_range(0.0..0.9),
        };
        let c1 = 2.0 * (p.d1 * p.r1).sqrt();
        for c in [0.5 * c1, c1 * (1.0 - 1e-12), c1, c1 * 1.5] {
            assert_eq!(wave_verdict(&p, c).verdict == WaveExistence::NotExists, c < c1);
        }
    }
}
