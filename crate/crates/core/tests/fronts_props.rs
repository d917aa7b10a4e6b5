use coopspread::cli::{execute, scenario};
use coopspread::fronts::{
    cone_infimum, estimate_speed, level_position, Direction, FitWindow, FrontTrace,
};
use coopspread::solver::{build_grid, integrate, FieldState, SnapshotRecorder};
use coopspread::{InitialCondition, Model};
use proptest::prelude::*;

proptest! {
    #[test]
    fn fit_recovers_exact_lines(a in -5.0f64..5.0, b in -50.0f64..50.0, n in 10usize..200) {
        let mut tr = FrontTrace::new(0, Direction::Right, 0.5);
        for i in 0..n {
            let t = 0.5 * i as f64;
            tr.push(t, a * t + b);
        }
        let est = estimate_speed(&tr, &FitWindow { fraction: 1.0, min_time: 0.0 }).unwrap();
        prop_assert!((est.speed - a).abs() < 1e-12, "{} vs {a}", est.speed);
        prop_assert!((est.intercept - b).abs() < 1e-12 * b.abs().max(10.0), "{} vs {b}", est.intercept);
    }

    #[test]
    fn level_position_is_translation_equivariant(shift in -40i32..40) {
        let g = build_grid(-50.0, 50.0, 1001).unwrap();
        let edge = 0.1 * shift as f64;
        let v = g.nodes().map(|x| if x < edge - 1e-9 { 1.0 } else { 0.0 }).collect();
        let s = FieldState::new(0.0, vec![v]);
        let x = level_position(&g, &s, 0, 0.5, Direction::Right).unwrap();
        prop_assert!((x - edge).abs() <= g.dx);
    }
}

#[test]
fn constant_field_has_no_front_and_flat_cone() {
    let g = build_grid(-10.0, 10.0, 201).unwrap();
    let s = FieldState::new(3.0, vec![vec![0.3; g.n]]);
    assert_eq!(level_position(&g, &s, 0, 0.5, Direction::Right), None);
    assert_eq!(cone_infimum(&g, &s, 0, 1.0).unwrap(), (0.3, 0.3));
}

#[test]
fn right_fronts_advance_after_transient() {
    for name in ["fisher", "remark_r1", "remark_r2", "remark_r3"] {
        let ex = execute(&scenario(name).unwrap()).unwrap();
        for tr in ex.traces.iter().filter(|t| t.direction == Direction::Right) {
            let skip = tr.samples.len() / 10;
            for w in tr.samples[skip..].windows(2) {
                assert!(w[1].1 >= w[0].1, "{name} u{} moved back at t={}", tr.species + 1, w[1].0);
            }
        }
    }
}

#[test]
fn symmetric_data_give_symmetric_speeds() {
    for name in ["fisher", "remark_r3"] {
        let ex = execute(&scenario(name).unwrap()).unwrap();
        for k in 0..ex.config.model.species() {
            let r = ex.front(k, Direction::Right).unwrap().outward_speed();
            let l = ex.front(k, Direction::Left).unwrap().outward_speed();
            assert!((r - l).abs() < 1e-6, "{name} u{}: {r} vs {l}", k + 1);
        }
    }
}

#[test]
fn fisher_speed_does_not_depend_on_the_level() {
    let cfg = scenario("fisher").unwrap();
    let grid = cfg.grid().unwrap();
    let ctrl = cfg.step_control(&grid).unwrap();
    let mut rec = SnapshotRecorder::default();
    integrate(&cfg.model, &cfg.init, &grid, &ctrl, &mut [&mut rec]).unwrap();
    let speeds: Vec<f64> = [0.25, 0.5, 0.75]
        .iter()
        .map(|&level| {
            let mut tr = FrontTrace::new(0, Direction::Right, level);
            for s in &rec.snapshots {
                if let Some(x) = level_position(&grid, s, 0, level, Direction::Right) {
                    tr.push(s.t, x);
                }
            }
            estimate_speed(&tr, &FitWindow::default()).unwrap().speed
        })
        .collect();
    let spread = speeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - speeds.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 0.05, "{speeds:?}");
}

#[test]
fn small_cone_sees_only_the_bump_plateau() {
    let g = build_grid(-20.0, 20.0, 201).unwrap();
    let ic = InitialCondition::CompactBump { amp: vec![0.5], width: 5.0, smoothing: 0.0 };
    let s = FieldState::new(0.5, ic.sample(&g).unwrap());
    assert_eq!(cone_infimum(&g, &s, 0, 1.0).unwrap(), (0.5, 0.5));
    let early = FieldState::new(0.1, s.species.clone());
    assert!(cone_infimum(&g, &early, 0, 1.0).is_err());
}

#[test]
fn fastened_invasion_cone_reaches_coexistence() {
    let ex = execute(&scenario("remark_r3").unwrap()).unwrap();
    let Model::Coop(p) = ex.config.model else { unreachable!() };
    let (_, k2) = p.coexistence();
    let last = ex.snapshots.last().unwrap();
    assert!((last.t - 80.0).abs() < 1e-9);
    let (inf, _) = cone_infimum(&ex.grid, last, 1, 1.0).unwrap();
    assert!((inf - k2).abs() < 0.05);
}
