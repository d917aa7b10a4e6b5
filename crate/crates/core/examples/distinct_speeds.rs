// Two species, two spreading speeds: a fast u1 outruns u2, and u2 stays
// inside the window between its isolated speed and 2 sqrt(d2 r2 k2).

use coopspread::cli::{execute, scenario};
use coopspread::model::Model;
use coopspread::theory::{fisher_speed, r2_upper_speed};

pub fn run_example() -> Result<(f64, f64), Box<dyn std::error::Error>> {
    let cfg = scenario("remark_r2")?;
    let Model::Coop(p) = cfg.model else { unreachable!("preset is cooperative") };
    let ex = execute(&cfg)?;
    let (u1, u2) = (ex.speed(0).ok_or("u1")?, ex.speed(1).ok_or("u2")?);
    let lo = fisher_speed(p.d2, p.r2 * (1.0 + p.b2))?;
    let hi = r2_upper_speed(&p).ok_or("upper bound not applicable")?;
    println!("u1 {u1:.4} (bound {:.4})", fisher_speed(p.d1, p.r1)?);
    println!("u2 {u2:.4} (window [{lo:.4}, {hi:.4}])");
    println!("separation {:.4}", u1 - u2);
    for rec in &ex.report.records {
        println!("{} {:5} passed={}", rec.species, rec.direction.as_str(), rec.passed());
    }
    Ok((u1, u2))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
