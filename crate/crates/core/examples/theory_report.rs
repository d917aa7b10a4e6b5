// Closed-form side only: bounds, regimes and traveling-wave verdicts.

use coopspread::cli::theory_report;
use coopspread::model::CoopParams;
use coopspread::theory::WaveExistence;

type Verdicts = Vec<(String, Vec<WaveExistence>)>;

pub fn run_example() -> Result<Verdicts, Box<dyn std::error::Error>> {
    let sets = [
        CoopParams::new(1.0, 1.0, 1.0, 1.0, 0.2, 0.5)?,
        CoopParams::new(1.0, 1.0, 4.0, 0.5, 0.2, 0.5)?,
        CoopParams::new(1.0, 1.0, 1.0, 0.8, 0.2, 0.5)?,
        CoopParams::new(1.0, 2.0, 1.0, 0.45, 0.2, 0.5)?,
        CoopParams::new(1.0, 1.0, 0.5, 1.0, 0.2, 0.5)?,
    ];
    let speeds = [1.0, 2.0, 2.5, 4.5];
    let mut out = Vec::new();
    for p in &sets {
        let r = theory_report(p, &speeds);
        let c_star = r.c_star.map_or("-".to_string(), |c| format!("{c:.4}"));
        println!("{:?}", p);
        println!("  K = ({:.4}, {:.4})  regime {}  c* {c_star}", r.coexistence.0, r.coexistence.1, r.regime);
        for (k, sb) in r.bounds.species.iter().enumerate() {
            let fmt = |b: &Option<coopspread::theory::Bound>| {
                b.as_ref().map_or("-".to_string(), |b| format!("{:.4} ({})", b.value, b.source))
            };
            println!("  u{}: lower {}  upper {}", k + 1, fmt(&sb.lower), fmt(&sb.upper));
        }
        for w in &r.waves {
            println!("  c = {:<4} {:?}: {}", w.c, w.verdict, w.reason);
        }
        out.push((r.regime.to_string(), r.waves.iter().map(|w| w.verdict).collect()));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
