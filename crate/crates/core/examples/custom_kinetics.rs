// Bring your own reaction term. The bistable equation
// u_t = u_xx + u(1-u)(u-a) has the exact front speed sqrt(2) (1/2 - a),
// which the generic integrator and front tracker reproduce.

use coopspread::fronts::{estimate_speed, FrontRecorder};
use coopspread::solver::{build_grid, integrate, Kinetics};
use coopspread::{Direction, FitWindow, InitialCondition, StepControl};

struct Bistable {
    a: f64,
}

impl Kinetics for Bistable {
    fn species(&self) -> usize {
        1
    }

    fn diffusion(&self, _k: usize) -> f64 {
        1.0
    }

    fn react(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0] * (1.0 - u[0]) * (u[0] - self.a);
    }

    fn target(&self) -> Option<Vec<f64>> {
        Some(vec![1.0])
    }
}

pub fn run_example() -> Result<(f64, f64), Box<dyn std::error::Error>> {
    let model = Bistable { a: 0.25 };
    let grid = build_grid(-100.0, 100.0, 2001)?;
    let ctrl = StepControl::auto(&grid, 1.0, 120.0, 1.0, 0.4)?;
    let ic = InitialCondition::CompactBump { amp: vec![1.0], width: 10.0, smoothing: 2.0 };
    let mut fronts = FrontRecorder::both_sides(&[0.5]);
    let summary = integrate(&model, &ic, &grid, &ctrl, &mut [&mut fronts])?;
    let trace = fronts.trace(0, Direction::Right).ok_or("no trace")?;
    let est = estimate_speed(trace, &FitWindow::default())?;
    let exact = 2f64.sqrt() * (0.5 - model.a);
    println!("steps {}  clamps {}", summary.steps, summary.clamp_count);
    println!("measured {:.4}  exact {exact:.4}", est.speed);
    Ok((est.speed, exact))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
