//! Command-line front end: single-instance solves, Monte Carlo sweeps and
//! the built-in self-check suite.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for runtime
//! failures, 4 when the self-check suite reports a failure.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swipt_secrecy::config::{describe, resolve_config};
use swipt_secrecy::experiments::{run_sweep, write_csv, ExperimentConfig};
use swipt_secrecy::model::{draw_channels, secrecy_rate, watts_to_dbm};
use swipt_secrecy::optimizer::{kkt_residual, solve_pa};
use swipt_secrecy::selfcheck::run_selfcheck;
use swipt_secrecy::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_SELFCHECK: u8 = 4;

#[derive(Parser)]
#[command(
    name = "swipt-secrecy",
    version,
    about = "Secrecy-rate maximization for wireless-powered relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel realization and print the operating point.
    Solve(SolveArgs),
    /// Run a Monte Carlo sweep and write plot-ready CSV.
    Sweep(SweepArgs),
    /// Run the built-in numerical checks.
    Selfcheck,
}

/// Configuration sources shared by solve and sweep. Precedence, lowest to
/// highest: built-in defaults, --config file, --set pairs, named flags.
#[derive(Args)]
struct CommonArgs {
    /// Config file of `section.key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override any config key, e.g. --set penalty.lambda0=50 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Base RNG seed (mirrors sweep.seed); realization j uses seed + j.
    #[arg(long)]
    seed: Option<u64>,

    /// Relay count (mirrors params.relays).
    #[arg(long)]
    relays: Option<usize>,

    /// Source power in dBm (mirrors params.source_dbm).
    #[arg(long)]
    source_dbm: Option<f64>,

    /// Artificial-noise power in dBm (mirrors params.an_dbm).
    #[arg(long)]
    an_dbm: Option<f64>,

    /// Noise power in dBm (mirrors params.noise_dbm).
    #[arg(long)]
    noise_dbm: Option<f64>,

    /// Energy conversion efficiency (mirrors params.efficiency).
    #[arg(long)]
    efficiency: Option<f64>,

    /// Print the fully resolved configuration before running.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Output CSV path.
    #[arg(long, value_name = "PATH", required = true)]
    out: PathBuf,

    /// Scenario (mirrors sweep.scenario):
    /// snr-sweep | an-sweep | relay-sweep | convergence.
    #[arg(long)]
    scenario: Option<String>,

    /// Comma-separated sweep points (mirrors sweep.values).
    #[arg(long)]
    values: Option<String>,

    /// Channel realizations per sweep point (mirrors sweep.realizations).
    #[arg(long)]
    realizations: Option<usize>,

    /// Methods to run, e.g. "pa,saf" (mirrors sweep.methods).
    #[arg(long)]
    methods: Option<String>,
}

impl CommonArgs {
    fn override_pairs(&self) -> Result<Vec<(String, String)>, Error> {
        let mut pairs = Vec::new();
        for item in &self.set {
            let Some((k, v)) = item.split_once('=') else {
                return Err(Error::MalformedLine {
                    line: 0,
                    content: item.clone(),
                });
            };
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut push = |k: &str, v: String| pairs.push((k.to_string(), v));
        if let Some(s) = self.seed {
            push("sweep.seed", s.to_string());
        }
        if let Some(n) = self.relays {
            push("params.relays", n.to_string());
        }
        if let Some(p) = self.source_dbm {
            push("params.source_dbm", p.to_string());
        }
        if let Some(p) = self.an_dbm {
            push("params.an_dbm", p.to_string());
        }
        if let Some(p) = self.noise_dbm {
            push("params.noise_dbm", p.to_string());
        }
        if let Some(e) = self.efficiency {
            push("params.efficiency", e.to_string());
        }
        Ok(pairs)
    }

    fn resolve(&self, extra: Vec<(String, String)>) -> Result<ExperimentConfig, Error> {
        let file_text = match &self.config {
            Some(path) => Some(fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?),
            None => None,
        };
        let mut pairs = self.override_pairs()?;
        pairs.extend(extra);
        let cfg = resolve_config(file_text.as_deref(), &pairs)?;
        if self.verbose {
            for (k, v) in describe(&cfg) {
                eprintln!("{k} = {v}");
            }
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::Selfcheck => run_selfcheck_cmd(),
    }
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let cfg = match args.common.resolve(Vec::new()) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, &e),
    };
    match solve_one(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_RUNTIME, &e),
    }
}

fn solve_one(cfg: &ExperimentConfig) -> Result<(), Error> {
    let geometry = cfg.geometry.realize(cfg.params.relay_count)?;
    let channels = draw_channels(&geometry, cfg.base_seed)?;
    let (sol, trace) = solve_pa(&cfg.params, &channels, &cfg.penalty, None)?;
    let rate = secrecy_rate(&cfg.params, &channels, &sol.beamformer, &sol.power_split);

    println!(
        "seed {} | N = {} | P_s = {:.1} dBm | P_d = {:.1} dBm | sigma^2 = {:.1} dBm",
        cfg.base_seed,
        cfg.params.relay_count,
        watts_to_dbm(cfg.params.source_power),
        watts_to_dbm(cfg.params.an_power),
        watts_to_dbm(cfg.params.noise_power),
    );
    println!("relay          w (re, im)        |w|      rho        psi");
    for i in 0..sol.relay_count() {
        let w = sol.beamformer[i];
        println!(
            "{:>5}  {:>9.5} {:>9.5}  {:>8.5}  {:>7.5}  {:>9.3e}",
            i + 1,
            w.re,
            w.im,
            w.norm(),
            sol.power_split[i],
            sol.slack[i],
        );
    }
    println!(
        "secrecy rate {:.6} bits/s/Hz | {} after {} iterations | projected gradient {:.3e}",
        rate,
        if trace.converged { "converged" } else { "NOT converged" },
        trace.iterations.len(),
        kkt_residual(&cfg.params, &channels, &sol, trace.final_lambda()),
    );
    Ok(())
}

fn run_sweep_cmd(args: SweepArgs) -> ExitCode {
    let mut extra = Vec::new();
    if let Some(s) = &args.scenario {
        extra.push(("sweep.scenario".to_string(), s.clone()));
    }
    if let Some(v) = &args.values {
        extra.push(("sweep.values".to_string(), v.clone()));
    }
    if let Some(r) = args.realizations {
        extra.push(("sweep.realizations".to_string(), r.to_string()));
    }
    if let Some(m) = &args.methods {
        extra.push(("sweep.methods".to_string(), m.clone()));
    }
    let cfg = match args.common.resolve(extra) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, &e),
    };
    match sweep_to_file(&cfg, &args.out) {
        Ok(rows) => {
            println!("wrote {} rows to {}", rows, args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_RUNTIME, &e),
    }
}

/// Write `# key = value` preamble lines (the fully resolved config, so the
/// file is self-describing) followed by the CSV body.
fn sweep_to_file(cfg: &ExperimentConfig, path: &PathBuf) -> Result<usize, Error> {
    let result = run_sweep(cfg)?;
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    let body = (|| -> std::io::Result<String> {
        for (k, v) in describe(cfg) {
            writeln!(out, "# {k} = {v}")?;
        }
        let mut buf = Vec::new();
        write_csv(&result, &mut buf)?;
        out.write_all(&buf)?;
        out.flush()?;
        Ok(String::from_utf8_lossy(&buf).into_owned())
    })()
    .map_err(io_err)?;
    Ok(body.lines().count().saturating_sub(1))
}

fn run_selfcheck_cmd() -> ExitCode {
    let report = run_selfcheck();
    for check in &report.checks {
        println!(
            "[{}] {}: {}",
            if check.passed { "ok" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    if report.all_passed() {
        println!("selfcheck passed");
        ExitCode::SUCCESS
    } else {
        eprintln!("selfcheck FAILED");
        ExitCode::from(EXIT_SELFCHECK)
    }
}

fn fail(code: u8, err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}
