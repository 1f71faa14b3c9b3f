//! `tlle`: command-line front end for the simulator and its diagnostics.
//!
//! Exit codes: 0 on success, 2 when a preset's acceptance checks fail,
//! 1 on any operational error. `TLLE_THREADS` caps the worker count.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tlle::analysis::DyadicRange;
use tlle::harness::{self, Component, ExperimentConfig, RevivalRequest, SimulateConfig, SweepParam};

#[derive(Parser)]
#[command(name = "tlle", version, about = "Talbot-effect simulator for the third-order Lugiato-Lefever equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration; writes solution.csv and energy.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Translate coefficients and evolved profile at t = pi*p/q.
    Revival {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value = "step")]
        profile: String,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1024)]
        modes: usize,
        #[arg(long, default_value = "revival.csv")]
        out: PathBuf,
    },
    /// Box-counting dimension of one frame of a solution.csv.
    Dimension {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "re")]
        component: Component,
        /// Dyadic levels `lo:hi`; defaults to the range suited to the sample count.
        #[arg(long)]
        scales: Option<DyadicRange>,
        /// Frame nearest this time; the last frame when omitted.
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, default_value = "dimension.csv")]
        out: PathBuf,
    },
    /// Sobolev norm of the Duhamel part against the free part, per stored frame.
    Smoothing {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1.3)]
        order: f64,
    },
    /// Repeat a configuration over values of one key; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 1.3)]
        order: f64,
    },
    /// Run a named experiment and judge it against its acceptance checks.
    Preset {
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Experiment file with `preset`, `seed`, `out_dir` and `[overrides]`.
        #[arg(long, conflicts_with_all = ["name", "out"])]
        config: Option<PathBuf>,
    },
}

enum Failure {
    Acceptance,
    Operational(String),
}

impl From<tlle::Error> for Failure {
    fn from(e: tlle::Error) -> Self {
        Failure::Operational(e.to_string())
    }
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("TLLE_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Operational(format!("TLLE_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config } => {
            let cfg = SimulateConfig::load(&config)?;
            for path in harness::simulate(&cfg)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Revival {
            p,
            q,
            beta,
            profile,
            amplitude,
            modes,
            out,
        } => {
            let req = RevivalRequest {
                p,
                q,
                beta,
                profile,
                amplitude,
                modes,
            };
            let (a, b) = harness::revival(&req, &out)?;
            println!("wrote {}", a.display());
            println!("wrote {}", b.display());
        }
        Command::Dimension {
            input,
            component,
            scales,
            time,
            out,
        } => {
            let est = harness::dimension(&input, component, scales, time, &out)?;
            println!("wrote {}", out.display());
            println!("slope={},stderr={}", est.slope, est.stderr);
            if est.out_of_range() {
                println!("note: slope lies outside [1, 2]");
            }
        }
        Command::Smoothing { config, order } => {
            let cfg = SimulateConfig::load(&config)?;
            println!("wrote {}", harness::smoothing(&cfg, order)?.display());
        }
        Command::Sweep {
            config,
            param,
            values,
            order,
        } => {
            let cfg = SimulateConfig::load(&config)?;
            println!("wrote {}", harness::sweep(&cfg, param, &values, order)?.display());
        }
        Command::Preset {
            name,
            seed,
            out,
            config,
        } => {
            let exp = match (config, name) {
                (Some(path), _) => ExperimentConfig::load(&path)?,
                (None, Some(name)) => {
                    let out = out.unwrap_or_else(|| PathBuf::from("out").join(&name));
                    ExperimentConfig::new(&name, seed, out)
                }
                (None, None) => return Err(Failure::Operational("preset needs --name or --config".into())),
            };
            let report = harness::run_experiment(&exp)?;
            for check in &report.checks {
                println!("{check}");
            }
            println!(
                "{} {} in {:.1}s, report at {}",
                if report.pass { "PASS" } else { "FAIL" },
                report.preset,
                report.wall_time_s,
                exp.out_dir.join("report.toml").display()
            );
            if !report.pass {
                return Err(Failure::Acceptance);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap's own usage-error code (2) would collide with acceptance failure
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = thread_cap().and_then(|cap| match cap {
        Some(n) => tlle::par::with_threads(n, || run(cli)),
        None => run(cli),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance) => ExitCode::from(2),
        Err(Failure::Operational(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
