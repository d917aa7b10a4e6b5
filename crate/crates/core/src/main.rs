use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coopspread::cli::{
    self, fit_traces, parse_config, parse_coop_params, parse_sweep, read_fronts_csv, scenario,
    theory_report, CliError, RunOutcome, EXIT_CONFIG, EXIT_FAILURE,
};
use coopspread::verify::{results_jsonl, suite_run, summary_table, VerifyError};
use coopspread::FitWindow;

#[derive(Parser)]
#[command(name = "coopspread", version, about = "Spreading-speed laboratory for cooperative reaction-diffusion systems")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named preset.
    Scenario {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit speeds to a fronts.csv file.
    Speed {
        #[arg(long)]
        fronts: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        fraction: f64,
        #[arg(long, default_value_t = 10.0)]
        min_time: f64,
    },
    /// Closed-form bounds, regimes and wave verdicts for one parameter set.
    Theory {
        /// e.g. "d1=1,d2=1,r1=1,r2=0.8,b1=0.2,b2=0.5"
        #[arg(long)]
        params: String,
        /// Wave speeds to classify.
        #[arg(long, value_delimiter = ',')]
        c: Vec<f64>,
    },
    /// Run a property suite (smoke or full).
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn report_run(outcome: &RunOutcome) -> ExitCode {
    print!("{}", outcome.execution.report.to_jsonl());
    if outcome.execution.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("run did not pass; see {}", outcome.dir.join("diagnostics.log").display());
        ExitCode::from(EXIT_FAILURE as u8)
    }
}

fn main_inner(args: Args) -> Result<ExitCode, CliError> {
    match args.command {
        Command::Simulate { config, out } => {
            let cfg = parse_config(&config)?;
            Ok(report_run(&cli::run(&cfg, &out)?))
        }
        Command::Scenario { name, out } => {
            let cfg = scenario(&name)?;
            Ok(report_run(&cli::run(&cfg, &out)?))
        }
        Command::Speed { fronts, fraction, min_time } => {
            let traces = read_fronts_csv(&fronts)?;
            let window = FitWindow { fraction, min_time };
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(CliError::Schema {
                    key: "fraction".into(),
                    message: format!("must lie in (0, 1], got {fraction}"),
                });
            }
            for f in fit_traces(&traces, &window)? {
                println!("{}", serde_json::to_string(&f).expect("fit serializes"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory { params, c } => {
            let p = parse_coop_params(&params)?;
            let report = theory_report(&p, &c);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => match suite_run(&suite) {
            Ok(results) => {
                print!("{}", results_jsonl(&results));
                eprint!("{}", summary_table(&results));
                Ok(if results.iter().all(|r| r.passed) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_FAILURE as u8)
                })
            }
            Err(VerifyError::UnknownSuite(name)) => Err(CliError::Schema {
                key: "suite".into(),
                message: format!("unknown suite `{name}`"),
            }),
            Err(e) => {
                eprintln!("error: {e}");
                Ok(ExitCode::from(EXIT_FAILURE as u8))
            }
        },
        Command::Sweep { spec, out, jobs } => {
            let spec = parse_sweep(&spec)?;
            let rows = cli::sweep(&spec, &out, jobs)?;
            for r in &rows {
                println!("{}", serde_json::to_string(r).expect("row serializes"));
            }
            Ok(if rows.iter().all(|r| r.status == "ok" && r.verdict == Some(true)) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILURE as u8)
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG as u8) } else { ExitCode::SUCCESS };
        }
    };
    match main_inner(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
