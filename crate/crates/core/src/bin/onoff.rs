use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use onoff_sched::experiments::{
    compete, sweep_fig6, write_csv, CompeteConfig, CompetePolicy, Fig6Config,
};
use onoff_sched::{simulate_policy, solve_offline, Error, Problem, SleepPolicy, SystemParams};

/// ON-OFF scheduling: off-line optimum, on-line simulation and sweeps.
#[derive(Parser)]
#[command(name = "onoff", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file optimally and write the schedule as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the DP tables as JSON.
        #[arg(long)]
        verbose: bool,
    },
    /// Run an on-line controller over an instance file.
    Simulate {
        instance: PathBuf,
        /// naive, det:<theta> or rand:<seed>
        #[arg(long, default_value = "naive")]
        policy: SleepPolicy,
        /// Where to write the event trace JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal vs naive cost over a range of maximum inter-arrival gaps.
    #[command(name = "sweep-fig6")]
    SweepFig6 {
        /// Inclusive range `lo..hi` of maximum gaps in ms, step 1 ms.
        #[arg(long, default_value = "1..100")]
        gaps: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Wake-up energies in uJ (mW*ms).
        #[arg(long, value_delimiter = ',', default_value = "1,7,14,28")]
        cw: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        tick_ms: f64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical competitive ratio on evenly spaced adversarial arrivals.
    Compete {
        #[arg(long, default_value = "det")]
        policy: CompetePolicy,
        #[arg(long, value_delimiter = ',', default_value = "1000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Arrival spacing in ticks; defaults to d + floor(c_wake / c_idle) + 1.
        #[arg(long)]
        gap: Option<i64>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 1)]
    beta: i64,
    #[arg(long, default_value_t = 10)]
    d: i64,
    #[arg(long, default_value_t = 10.0)]
    c_wake: f64,
    #[arg(long, default_value_t = 1.0)]
    c_busy: f64,
    #[arg(long, default_value_t = 1.0)]
    c_idle: f64,
}

fn read_problem(path: &Path) -> Result<Problem, Error> {
    Problem::from_json_reader(io::BufReader::new(File::open(path)?))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_gaps(s: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidConfig {
        reason: format!("--gaps {s:?} must look like lo..hi with 1 <= lo <= hi"),
    };
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).map(f64::from).collect())
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Solve {
            instance,
            out,
            verbose,
        } => {
            let problem = read_problem(&instance)?;
            let sol = solve_offline(&problem)?;
            if verbose {
                let tables: Vec<_> = sol.saps.iter().map(|s| s.trace()).collect();
                eprintln!("{}", serde_json::to_string_pretty(&tables)?);
            }
            match out {
                Some(path) => {
                    let mut w = output(Some(&path))?;
                    serde_json::to_writer_pretty(&mut w, &sol.schedule)?;
                    writeln!(w)?;
                    println!("{}", serde_json::to_string(&sol.cost)?);
                }
                None => {
                    println!("{}", serde_json::to_string(&sol.schedule)?);
                    println!("{}", serde_json::to_string(&sol.cost)?);
                }
            }
        }
        Cmd::Simulate {
            instance,
            policy,
            out,
        } => {
            let problem = read_problem(&instance)?;
            let trace = simulate_policy(&problem, policy)?;
            let optimal = solve_offline(&problem)?.cost.total;
            if let Some(path) = out {
                let mut w = output(Some(&path))?;
                serde_json::to_writer(&mut w, &trace)?;
                writeln!(w)?;
            }
            let ratio = if optimal > 0.0 {
                trace.cost.total / optimal
            } else {
                1.0
            };
            println!("policy,total,ratio");
            println!("{policy},{},{ratio}", trace.cost.total);
        }
        Cmd::SweepFig6 {
            gaps,
            n,
            cw,
            tick_ms,
            seed,
            out,
        } => {
            let cfg = Fig6Config {
                max_gaps_ms: parse_gaps(&gaps)?,
                n_tasks: n,
                c_wake_uj: cw,
                tick_ms,
                seed,
                ..Fig6Config::default()
            };
            write_csv(output(out.as_deref())?, &sweep_fig6(&cfg)?)?;
        }
        Cmd::Compete {
            policy,
            n,
            trials,
            seed,
            gap,
            params:
                ParamArgs {
                    beta,
                    d,
                    c_wake,
                    c_busy,
                    c_idle,
                },
            out,
        } => {
            let cfg = CompeteConfig {
                policy,
                ns: n,
                trials,
                seed,
                params: SystemParams::new(beta, d, c_wake, c_busy, c_idle)?,
                gap,
            };
            write_csv(output(out.as_deref())?, &compete(&cfg)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
