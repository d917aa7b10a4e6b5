// Linear determinacy and its failure for u_t = u_xx + u(1-u)(1+nu u).
//
// For small nu the front moves at the linear speed 2. Past nu = 2 the
// nonlinearity pushes it faster.

use coopspread::cli::{execute, scenario};

pub fn run_example() -> Result<Vec<(f64, f64)>, Box<dyn std::error::Error>> {
    let mut rows = Vec::new();
    for nu in [0.0, 1.0, 2.0, 3.0, 4.0, 6.0] {
        let mut cfg = scenario("cubic_nu1")?;
        cfg.model = coopspread::Model::Cubic(coopspread::CubicParams::new(1.0, nu)?);
        let speed = execute(&cfg)?.speed(0).ok_or("front not fitted")?;
        println!("nu {nu:>3}  speed {speed:.4}  excess over linear {:+.4}", speed - 2.0);
        rows.push((nu, speed));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
