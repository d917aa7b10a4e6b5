// Fisher front from a compact bump: measured speed against 2 sqrt(d r).
//
// ```bash
// cargo run --release --example fisher_front
// ```

use coopspread::cli::{execute, scenario};
use coopspread::theory::fisher_speed;
use coopspread::Direction;

pub fn run_example() -> Result<(f64, f64), Box<dyn std::error::Error>> {
    let cfg = scenario("fisher")?;
    let ex = execute(&cfg)?;
    let front = ex.front(0, Direction::Right).ok_or("no right front")?;
    let measured = front.outward_speed();
    let predicted = fisher_speed(1.0, 1.0)?;
    println!("level {:.2}, fit over t in [{}, {}]", front.level, front.estimate.fit_window.0, front.estimate.fit_window.1);
    println!("measured {measured:.4}  predicted {predicted:.4}  residual rms {:.2e}", front.estimate.residual_rms);
    Ok((measured, predicted))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
