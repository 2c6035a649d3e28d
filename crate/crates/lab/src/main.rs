use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nullcurve_lab::commands::{cmd_classify, cmd_portrait, cmd_solve};
use nullcurve_lab::config::{Method, Overrides, RunConfig};
use nullcurve_lab::output::to_json;
use nullcurve_lab::verify::{run_suite, Suite};
use nullcurve_lab::{LabError, LabResult};

#[derive(Parser)]
#[command(name = "nullcurve", version, about = "Extremal null curves in Minkowski 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate an extremal from a JSON config; flags override config fields.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        l4: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        l5: Option<f64>,
        #[arg(long = "T")]
        t_end: Option<f64>,
        #[arg(long)]
        dt_max: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sample the (chi, l4) phase portrait of a Casimir level.
    Portrait {
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, allow_hyphen_values = true)]
        c1: f64,
        #[arg(long, allow_hyphen_values = true)]
        c2: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify the coadjoint orbit of (p, v) and print its cross-section.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

fn triple(name: &str, s: &str) -> LabResult<[f64; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || LabError::Usage(format!("--{name} expects three comma-separated numbers, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = [0.0f64; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| bad())?;
        if !o.is_finite() {
            return Err(bad());
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> LabResult<()> {
    match cli.command {
        Command::Solve { config, method, out, m, k, l4, l5, t_end, dt_max, tol } => {
            let ov = Overrides { m, k, l4, l5, t_end, dt_max, tol, method, outputs: out };
            let cfg = RunConfig::load(config.as_deref(), &ov)?;
            let inv = cmd_solve(&cfg)?;
            print!("{}", to_json(&inv));
            Ok(())
        }
        Command::Portrait { m, c1, c2, out } => {
            let summary = cmd_portrait(m, c1, c2, &out)?;
            print!("{}", to_json(&summary));
            Ok(())
        }
        Command::Classify { p, v } => {
            let c = cmd_classify(triple("p", &p)?, triple("v", &v)?)?;
            print!("{}", to_json(&c));
            Ok(())
        }
        Command::Verify { suite } => {
            let report = run_suite(suite);
            println!("{}", report.to_json());
            for c in &report.criteria {
                eprintln!("{}", c.line());
            }
            if report.pass {
                Ok(())
            } else {
                let failed: Vec<String> = report.criteria.iter().filter(|c| !c.pass).map(|c| c.id.to_string()).collect();
                Err(LabError::Verification(format!("criteria {} failed", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nullcurve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
