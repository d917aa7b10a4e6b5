// Sweep the cooperation strength b2 and watch the u2 speed climb toward
// the u1 speed.

use coopspread::cli::{parse_sweep_str, sweep, SweepRow};

pub fn run_example() -> Result<Vec<SweepRow>, Box<dyn std::error::Error>> {
    let spec = parse_sweep_str(
        r#"
sweep.scenario = "remark_r3"
sweep.jobs = 4
sweep.axis.model.b2 = [0.0, 0.1, 0.25, 0.5, 1.0]
time.t_end = 60
"#,
    )?;
    let dir = tempfile::tempdir()?;
    let rows = sweep(&spec, dir.path(), None)?;
    println!("{:>6}  {:>8}  {:>8}  {:>8}  regime", "b2", "u2", "lower", "upper");
    for r in &rows {
        let cell = |v: &[Option<f64>], k: usize| v.get(k).copied().flatten().map_or("-".into(), |x| format!("{x:.4}"));
        println!(
            "{:>6}  {:>8}  {:>8}  {:>8}  {}",
            r.values[0],
            cell(&r.speeds, 1),
            cell(&r.lower, 1),
            cell(&r.upper, 1),
            r.regime.as_deref().unwrap_or("-")
        );
    }
    println!("{}", std::fs::read_to_string(dir.path().join("sweep.csv"))?.lines().next().unwrap_or(""));
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
