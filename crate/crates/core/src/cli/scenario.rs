//! Named presets. Every coupled preset starts from compactly supported data
//! lying below the coexistence state.

use super::config::{GridSpec, ObserveSpec, OutputSpec, RunConfig, TimeSpec};
use super::CliError;
use crate::fronts::{FitWindow, Tolerance};
use crate::model::{CoopParams, CubicParams, FisherParams, Model};
use crate::solver::InitialCondition;

pub const SCENARIOS: &[&str] =
    &["fisher", "cubic_nu4", "cubic_nu1", "remark_r1", "remark_r2", "remark_r3"];

fn base(model: Model, t_end: f64, cones: Vec<f64>) -> RunConfig {
    RunConfig {
        grid: GridSpec { x_min: -400.0, x_max: 400.0, dx: 0.2 },
        time: TimeSpec { t_end, dt: None, safety: 0.4, snapshot_every: 1.0 },
        init: InitialCondition::CompactBump {
            amp: vec![0.5; model.species()],
            width: 5.0,
            smoothing: 0.0,
        },
        observe: ObserveSpec {
            levels: None,
            cones,
            fit: FitWindow::default(),
            tolerance: Tolerance::default(),
        },
        output: OutputSpec { snapshot_stride: 1, dir: None },
        model,
    }
}

fn coop(d1: f64, r1: f64, d2: f64, r2: f64, b1: f64, b2: f64) -> Model {
    Model::Coop(CoopParams { d1, d2, r1, r2, b1, b2 })
}

pub fn scenario(name: &str) -> Result<RunConfig, CliError> {
    let cfg = match name {
        "fisher" => base(Model::Fisher(FisherParams { d: 1.0, r: 1.0, k: 1.0 }), 150.0, vec![1.0]),
        "cubic_nu4" => base(Model::Cubic(CubicParams { d: 1.0, nu: 4.0 }), 150.0, vec![]),
        "cubic_nu1" => base(Model::Cubic(CubicParams { d: 1.0, nu: 1.0 }), 150.0, vec![]),
        // Equal coefficients: both species spread at 2 sqrt(d1 r1).
        "remark_r1" => base(coop(1.0, 1.0, 1.0, 1.0, 0.2, 0.5), 80.0, vec![1.0]),
        // d1 r1 > d2 r2 k2: u1 at 4, u2 between 2 sqrt(0.75) and 2 sqrt(5/6).
        "remark_r2" => base(coop(1.0, 4.0, 1.0, 0.5, 0.2, 0.5), 80.0, vec![1.0]),
        // 2 sqrt(0.8) < 2 <= 2 sqrt(1.2): u2 is dragged up to speed 2.
        "remark_r3" => base(coop(1.0, 1.0, 1.0, 0.8, 0.2, 0.5), 80.0, vec![1.0]),
        other => return Err(CliError::UnknownScenario(other.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{classify_regime, RegimeTag};

    #[test]
    fn presets_are_valid_and_deterministic() {
        for name in SCENARIOS {
            assert_eq!(scenario(name).unwrap(), scenario(name).unwrap());
        }
        assert!(matches!(scenario("nope"), Err(CliError::UnknownScenario(_))));
    }

    #[test]
    fn preset_parameters() {
        let f = scenario("fisher").unwrap();
        assert_eq!(f.model, Model::Fisher(FisherParams { d: 1.0, r: 1.0, k: 1.0 }));
        assert_eq!(f.grid.x_max, 400.0);
        assert_eq!(f.time.t_end, 150.0);
        assert_eq!(
            f.init,
            InitialCondition::CompactBump { amp: vec![0.5], width: 5.0, smoothing: 0.0 }
        );
        for (name, tag) in [
            ("remark_r1", RegimeTag::RemarkR1),
            ("remark_r2", RegimeTag::RemarkR2),
            ("remark_r3", RegimeTag::RemarkR3),
        ] {
            let Model::Coop(p) = scenario(name).unwrap().model else { panic!() };
            assert_eq!(classify_regime(&p), tag, "{name}");
        }
    }
}
