//! Every example runs and reports what it claims.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(fisher_front);
example!(fastened_invasion);
example!(distinct_speeds);
example!(pushed_front);
example!(theory_report);
example!(comparison_principle);
example!(cooperation_sweep);
example!(half_line_invasion);
example!(custom_kinetics);
example!(verify_suite);

use coopspread::theory::WaveExistence;

#[test]
fn fisher_front_near_linear_speed() {
    let (measured, predicted) = fisher_front::run_example().unwrap();
    assert_eq!(predicted, 2.0);
    assert!((1.85..=2.02).contains(&measured));
}

#[test]
fn fastened_invasion_beats_isolated_speed() {
    let f = fastened_invasion::run_example().unwrap();
    assert!(f.u2 > f.isolated + 0.05);
    assert!((f.u2 - f.c_star).abs() < 0.1);
}

#[test]
fn distinct_speeds_separate() {
    let (u1, u2) = distinct_speeds::run_example().unwrap();
    assert!(u1 - u2 > 1.8);
}

#[test]
fn pushed_front_speeds_up_past_two() {
    let rows = pushed_front::run_example().unwrap();
    for &(nu, s) in &rows {
        if nu <= 2.0 {
            assert!((1.9..2.02).contains(&s), "nu={nu}: {s}");
        } else {
            // Pushed speed sqrt(nu/2) + sqrt(2/nu), minus discretization lag.
            let pushed = (nu / 2.0).sqrt() + (2.0 / nu).sqrt();
            assert!(s > 2.02 && (s - pushed).abs() < 0.05, "nu={nu}: {s} vs {pushed}");
        }
    }
}

#[test]
fn theory_report_regimes() {
    let out = theory_report::run_example().unwrap();
    let regimes: Vec<&str> = out.iter().map(|(r, _)| r.as_str()).collect();
    assert_eq!(regimes, ["remark_r1", "remark_r2", "remark_r3", "theorem_only", "outside"]);
    assert_eq!(out[0].1[0], WaveExistence::NotExists);
    assert_eq!(out[0].1[2], WaveExistence::Exists);
}

#[test]
fn comparison_holds() {
    assert!(comparison_principle::run_example().unwrap().iter().all(|r| r.passed));
}

#[test]
fn cooperation_sweep_is_monotone() {
    let rows = cooperation_sweep::run_example().unwrap();
    let u2: Vec<f64> = rows.iter().map(|r| r.speeds[1].unwrap()).collect();
    assert!(u2.windows(2).all(|w| w[1] >= w[0] - 1e-3), "{u2:?}");
}

#[test]
fn half_line_invasion_runs() {
    let u2 = half_line_invasion::run_example().unwrap();
    assert!((1.85..2.05).contains(&u2), "{u2}");
}

#[test]
fn custom_kinetics_matches_exact_speed() {
    let (measured, exact) = custom_kinetics::run_example().unwrap();
    assert!((measured - exact).abs() < 0.01, "{measured} vs {exact}");
}

#[test]
fn verify_suite_passes() {
    assert!(verify_suite::run_example().unwrap().iter().all(|r| r.passed));
}
