// Config-file workflow: both species occupy the left half-line and invade
// the right. The config is written to disk, parsed, echoed and run, and
// the five run artifacts land in a temporary directory.

use coopspread::cli::{parse_config, run, ARTIFACTS};

const CONFIG: &str = r#"
model.kind = "coop"
model.d1 = 1.0
model.d2 = 1.0
model.r1 = 1.0
model.r2 = 0.8
model.b1 = 0.2
model.b2 = 0.5

grid.x_min = -100
grid.x_max = 300
grid.dx = 0.2

time.t_end = 80

init.kind = "step"
init.amp = [1.0, 1.0]
init.position = 0.0

observe.cones = []
output.snapshot_stride = 10
"#;

pub fn run_example() -> Result<f64, Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("invasion.toml");
    std::fs::write(&path, CONFIG)?;
    let cfg = parse_config(&path)?;
    let out = run(&cfg, &dir.path().join("run"))?;
    for a in ARTIFACTS {
        let len = std::fs::metadata(out.dir.join(a))?.len();
        println!("{a:<16} {len:>9} bytes");
    }
    let speeds = std::fs::read_to_string(out.dir.join("speeds.jsonl"))?;
    print!("{speeds}");
    let u2 = out.execution.speed(1).ok_or("u2 front not fitted")?;
    println!("u2 invades at {u2:.4}");
    Ok(u2)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
