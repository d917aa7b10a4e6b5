// A slow species dragged to the speed of a fast cooperating partner.
//
// Alone, u2 would spread at 2 sqrt(0.8) = 1.789. With cooperation it
// follows u1 at the common speed 2.

use coopspread::cli::{execute, scenario};
use coopspread::model::Model;
use coopspread::theory::{classify_regime, coop_lower_speed, fisher_speed};

pub struct Fastened {
    pub isolated: f64,
    pub c_star: f64,
    pub u1: f64,
    pub u2: f64,
}

pub fn run_example() -> Result<Fastened, Box<dyn std::error::Error>> {
    let cfg = scenario("remark_r3")?;
    let Model::Coop(p) = cfg.model else { unreachable!("preset is cooperative") };
    let ex = execute(&cfg)?;
    let out = Fastened {
        isolated: fisher_speed(p.d2, p.r2)?,
        c_star: coop_lower_speed(&p)?,
        u1: ex.speed(0).ok_or("u1 front not fitted")?,
        u2: ex.speed(1).ok_or("u2 front not fitted")?,
    };
    println!("regime {}", classify_regime(&p).as_str());
    println!("u2 alone   {:.4}", out.isolated);
    println!("c*         {:.4}", out.c_star);
    println!("measured   u1 {:.4}  u2 {:.4}", out.u1, out.u2);
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
