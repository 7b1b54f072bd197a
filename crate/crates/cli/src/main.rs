//! `irs-hho`: run the beamforming experiments and write their CSV output.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use irs_hho::experiments::{
    convergence_run, difference_report, hho_sanity, linear_fit_r2, oracle_check,
    parse_list, parse_schemes, parse_seed_list, read_records, sweep_distance, timing_run,
    write_csv_file, ExperimentConfig, OracleConfig, SanityConfig, Scheme, TestFunction,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_ORACLE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "irs-hho", version, about = "Harris Hawks beamforming experiments for IRS-aided MISO links")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; they override values from `--config`.
#[derive(Args, Debug, Default)]
struct Common {
    /// JSON file with experiment settings
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed list: "0,3,7" or a range "0..10"
    #[arg(long, global = true)]
    seeds: Option<String>,
    /// HHO population size Q
    #[arg(long, global = true)]
    pop: Option<usize>,
    /// HHO iteration budget T
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Comma-separated AP–user horizontal distances in meters
    #[arg(long = "d-list", global = true)]
    d_list: Option<String>,
    /// Comma-separated schemes: no-irs, ao, hho
    #[arg(long, global = true)]
    schemes: Option<String>,
    /// Run everything on one thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SNR of every scheme versus AP–user distance
    Sweep,
    /// Per-distance SNR difference between two schemes of a sweep CSV
    Diff {
        /// Sweep CSV (defaults to <out>/sweep.csv)
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "hho")]
        a: String,
        #[arg(long, default_value = "ao")]
        b: String,
    },
    /// Best-so-far fitness per iteration at one distance
    Converge {
        #[arg(long, default_value_t = 25.0)]
        d: f64,
    },
    /// Wall time of HHO over a (Q, T) grid
    Timing {
        #[arg(long = "pop-grid", default_value = "40,80,160")]
        pop_grid: String,
        #[arg(long = "iter-grid", default_value = "250,500,1000")]
        iter_grid: String,
        #[arg(long, default_value_t = 25.0)]
        d: f64,
        /// Runs per grid point; the fastest is reported
        #[arg(long, default_value_t = 1)]
        repeats: usize,
    },
    /// Compare AO, grid search and HHO with the single-antenna optimum
    Oracle {
        #[arg(long = "n-list", default_value = "2,4,6")]
        n_list: String,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        /// HHO seeds per instance
        #[arg(long = "hho-seeds", default_value = "0..10")]
        hho_seeds: String,
        #[arg(long, default_value_t = 64)]
        levels: usize,
    },
    /// HHO on sphere and Rastrigin
    Sanity {
        #[arg(long, default_value_t = 30)]
        dim: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Config(anyhow::Error),
    Oracle,
    Other(anyhow::Error),
}

impl From<irs_hho::Error> for Failure {
    fn from(e: irs_hho::Error) -> Self {
        match e {
            irs_hho::Error::Config(_) | irs_hho::Error::Json(_) => Failure::Config(e.into()),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn experiment_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))
                .map_err(config_err)?;
            ExperimentConfig::from_json_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))
                .map_err(config_err)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(s) = &common.seeds {
        cfg.seeds = parse_seed_list(s)?;
    }
    if let Some(q) = common.pop {
        cfg.q = q;
    }
    if let Some(t) = common.iters {
        cfg.t = t;
    }
    if let Some(d) = &common.d_list {
        cfg.d_list = parse_list(d)?;
    }
    if let Some(s) = &common.schemes {
        cfg.schemes = parse_schemes(s)?;
    }
    if common.sequential {
        cfg.execution = irs_hho::Execution::Sequential;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, rows: &[impl serde::Serialize]) -> Result<(), Failure> {
    write_csv_file(path, rows).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = experiment_config(&cli.common)?;
    match cli.command {
        Command::Sweep => {
            let records = sweep_distance(&cfg)?;
            write(&cfg.out.join("sweep.csv"), &records)?;
            for scheme in &cfg.schemes {
                for &d in &cfg.d_list {
                    let snr: Vec<f64> = records
                        .iter()
                        .filter(|r| r.scheme == *scheme && r.d_m == d)
                        .map(|r| r.snr_db)
                        .collect();
                    let mean = snr.iter().sum::<f64>() / snr.len() as f64;
                    println!("{scheme:>7} d={d:>5} m  mean SNR {mean:8.3} dB");
                }
            }
        }
        Command::Diff { input, a, b } => {
            let a: Scheme = a.parse()?;
            let b: Scheme = b.parse()?;
            let input = input.unwrap_or_else(|| cfg.out.join("sweep.csv"));
            let file = std::fs::File::open(&input)
                .with_context(|| format!("opening {}", input.display()))?;
            let rows = difference_report(&read_records(file)?, a, b)?;
            write(&cfg.out.join(format!("diff_{a}_minus_{b}.csv")), &rows)?;
            for r in &rows {
                println!("d={:>5} m  {a}-{b} {:+.4} dB (std {:.4}, n={})", r.d_m, r.mean_diff_db, r.std_diff_db, r.seeds);
            }
        }
        Command::Converge { d } => {
            let rows = convergence_run(&cfg, d)?;
            write(&cfg.out.join(format!("converge_d{d}.csv")), &rows)?;
            for &seed in &cfg.seeds {
                let trace: Vec<f64> = rows.iter().filter(|r| r.seed == seed).map(|r| r.best_fitness_w).collect();
                let last = *trace.last().expect("T >= 1");
                let mid = trace[trace.len().min(500) - 1];
                println!("seed {seed}: final {last:.6e} W, iteration-{} value at {:.2}% of final", trace.len().min(500), 100.0 * mid / last);
            }
        }
        Command::Timing { pop_grid, iter_grid, d, repeats } => {
            let pops: Vec<usize> = parse_list(&pop_grid)?;
            let iters: Vec<usize> = parse_list(&iter_grid)?;
            let grid: Vec<(usize, usize)> = pops.iter().flat_map(|&q| iters.iter().map(move |&t| (q, t))).collect();
            let rows = timing_run(&cfg, &grid, d, repeats)?;
            write(&cfg.out.join("timing.csv"), &rows)?;
            let x: Vec<f64> = rows.iter().map(|r| (r.q * r.t) as f64).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.wall_time_s).collect();
            let (a, b, r2) = linear_fit_r2(&x, &y);
            println!("wall_time ≈ {a:.4e} + {b:.4e}·Q·T s, R² = {r2:.4}");
        }
        Command::Oracle { n_list, instances, hho_seeds, levels } => {
            let mut experiment = cfg.clone();
            if cli.common.config.is_none() {
                experiment.m = 1;
            }
            let defaults = OracleConfig::default();
            let oc = OracleConfig {
                experiment,
                n_list: parse_list(&n_list)?,
                instances,
                hho_seeds: parse_seed_list(&hho_seeds)?,
                q: cli.common.pop.unwrap_or(defaults.q),
                t: cli.common.iters.unwrap_or(defaults.t),
                phase_levels: levels,
            };
            let report = match oracle_check(&oc) {
                Err(e @ irs_hho::Error::RequiresSingleAntenna(_)) => return Err(config_err(e)),
                other => other?,
            };
            write(&cfg.out.join("oracle.csv"), &report.rows)?;
            println!("ao within 1e-6 of closed form:       {}", verdict(report.ao_ok()));
            println!("grid search at >= 99.5% of optimum:  {}", verdict(report.brute_force_ok()));
            println!("hho median at >= 98% of optimum:     {}", verdict(report.hho_ok()));
            if !report.passed() {
                return Err(Failure::Oracle);
            }
        }
        Command::Sanity { dim } => {
            let defaults = SanityConfig::default();
            let sc = SanityConfig {
                dim,
                q: cli.common.pop.unwrap_or(defaults.q),
                t: cli.common.iters.unwrap_or(defaults.t),
                seeds: match &cli.common.seeds {
                    Some(s) => parse_seed_list(s)?,
                    None => defaults.seeds,
                },
                functions: defaults.functions,
                execution: cfg.execution,
            };
            let report = hho_sanity(&sc)?;
            write(&cfg.out.join("sanity.csv"), &report.rows)?;
            for f in [TestFunction::Sphere, TestFunction::Rastrigin] {
                println!("{f:?}: gap < 1e-6 in {:.0}% of runs", 100.0 * report.success_rate(f, 1e-6));
            }
            println!("traces monotone: {}", verdict(report.all_monotone()));
        }
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Oracle) => {
            eprintln!("oracle check failed");
            ExitCode::from(EXIT_ORACLE)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

