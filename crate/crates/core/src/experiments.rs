//! Monte Carlo experiment harness.
//!
//! Sweeps one parameter (source SNR, artificial-noise power or relay count),
//! averages the secrecy rate of each method over seeded channel realizations
//! and emits plot-ready CSV. Realization j always uses seed
//! `base_seed + j`, so a config fully determines every emitted byte. The
//! convergence scenario instead records the per-iteration split and secrecy
//! trace of a single solve.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::baseline::{saf_search, SafConfig};
use crate::error::{Error, Result};
use crate::model::{
    self, dbm_to_watts, draw_channels, ChannelSet, NetworkGeometry, SystemParams,
};
use crate::optimizer::{solve_pa, PenaltyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The block-wise penalty solver.
    Pa,
    /// The simple amplify-and-forward grid-search benchmark.
    Saf,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pa => "PA",
            Method::Saf => "SAF",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Sweep SNR_s = P_s / sigma^2 in dB at fixed AN power.
    SnrSweep,
    /// Sweep the AN power in dBm.
    AnSweep,
    /// Sweep the relay count.
    RelaySweep,
    /// Trace one solve iteration by iteration.
    Convergence,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::SnrSweep => "snr-sweep",
            Scenario::AnSweep => "an-sweep",
            Scenario::RelaySweep => "relay-sweep",
            Scenario::Convergence => "convergence",
        }
    }
}

/// Where the nodes sit. `Auto` keeps the default relay segment so the relay
/// count may vary per sweep point; `Explicit` pins every position.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    Auto {
        source: (f64, f64),
        dest: (f64, f64),
        eve: (f64, f64),
    },
    Explicit(NetworkGeometry),
}

impl Default for GeometrySpec {
    fn default() -> Self {
        let g = NetworkGeometry::default_layout(1);
        GeometrySpec::Auto {
            source: g.source,
            dest: g.dest,
            eve: g.eve,
        }
    }
}

impl GeometrySpec {
    pub fn realize(&self, relay_count: usize) -> Result<NetworkGeometry> {
        match self {
            GeometrySpec::Auto { source, dest, eve } => {
                let mut g = NetworkGeometry::default_layout(relay_count);
                g.source = *source;
                g.dest = *dest;
                g.eve = *eve;
                Ok(g)
            }
            GeometrySpec::Explicit(g) => {
                if g.relay_count() != relay_count {
                    return Err(Error::LengthMismatch {
                        what: "geometry.relays".into(),
                        got: g.relay_count(),
                        expected: relay_count,
                    });
                }
                Ok(g.clone())
            }
        }
    }
}

/// Everything one sweep needs. The swept field of `params` is overridden per
/// sweep point.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub sweep_values: Vec<f64>,
    pub realizations: usize,
    pub base_seed: u64,
    pub geometry: GeometrySpec,
    pub params: SystemParams,
    pub penalty: PenaltyConfig,
    pub saf: SafConfig,
    pub methods: Vec<Method>,
}

impl ExperimentConfig {
    /// Documented defaults: P_s = P_d = 40 dBm, sigma^2 = -40 dBm,
    /// eta = 0.5, five relays, 100 realizations, both methods and the
    /// conventional sweep ranges per scenario.
    pub fn defaults_for(scenario: Scenario) -> Self {
        let (sweep_values, realizations) = match scenario {
            Scenario::SnrSweep => (vec![10.0, 20.0, 30.0, 40.0, 50.0], 100),
            Scenario::AnSweep => (vec![30.0, 40.0], 100),
            Scenario::RelaySweep => (vec![1.0, 3.0, 5.0], 100),
            Scenario::Convergence => (vec![0.0], 1),
        };
        ExperimentConfig {
            scenario,
            sweep_values,
            realizations,
            base_seed: 1,
            geometry: GeometrySpec::default(),
            params: SystemParams {
                source_power: dbm_to_watts(40.0),
                an_power: dbm_to_watts(40.0),
                noise_power: dbm_to_watts(-40.0),
                efficiency: 0.5,
                relay_count: 5,
            },
            penalty: PenaltyConfig::default(),
            saf: SafConfig::default(),
            methods: vec![Method::Pa, Method::Saf],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.penalty.validate()?;
        self.saf.validate()?;
        if self.realizations < 1 {
            return Err(Error::invalid("realizations", "[1, inf)", self.realizations));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::invalid("sweep_values", "a nonempty list", "[]"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "a nonempty subset of {pa, saf}", "[]"));
        }
        match self.scenario {
            Scenario::RelaySweep => {
                for &v in &self.sweep_values {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(Error::invalid("sweep_values", "positive integers", v));
                    }
                }
                if matches!(self.geometry, GeometrySpec::Explicit(_)) {
                    return Err(Error::invalid(
                        "geometry.relays",
                        "unset for relay-sweep (relay positions are regenerated per point)",
                        "explicit list",
                    ));
                }
            }
            Scenario::Convergence if self.realizations != 1 => {
                return Err(Error::invalid(
                    "realizations",
                    "exactly 1 for the convergence scenario",
                    self.realizations,
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Parameters at one sweep point.
    fn params_at(&self, value: f64) -> SystemParams {
        let mut p = self.params;
        match self.scenario {
            Scenario::SnrSweep => p.source_power = p.noise_power * 10f64.powf(value / 10.0),
            Scenario::AnSweep => p.an_power = dbm_to_watts(value),
            Scenario::RelaySweep => p.relay_count = value as usize,
            Scenario::Convergence => {}
        }
        p
    }
}

/// Aggregated secrecy rates of one method at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub method: Method,
    /// Mean over the converged realizations (0.0 when none converged).
    pub mean: f64,
    /// Standard error of that mean (0.0 with fewer than two samples).
    pub stderr: f64,
    /// Realizations dropped because the solver did not converge.
    pub failures: usize,
    /// Per-realization rates in seed order (converged runs only).
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: Vec<MethodStats>,
}

/// Iteration-by-iteration record of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// rho[iteration][relay]
    pub rho: Vec<Vec<f64>>,
    /// Reported secrecy rate per iteration.
    pub secrecy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub points: Vec<SweepPoint>,
    pub convergence: Option<ConvergenceTrace>,
}

fn mean_and_stderr(rates: &[f64]) -> (f64, f64) {
    let n = rates.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = rates.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn run_method(
    method: Method,
    params: &SystemParams,
    channels: &ChannelSet,
    penalty: &PenaltyConfig,
    saf: &SafConfig,
) -> Result<Option<f64>> {
    match method {
        Method::Pa => {
            let (sol, trace) = solve_pa(params, channels, penalty, None)?;
            if trace.converged {
                Ok(Some(model::secrecy_rate(
                    params,
                    channels,
                    &sol.beamformer,
                    &sol.power_split,
                )))
            } else {
                Ok(None)
            }
        }
        Method::Saf => {
            let (_, rate) = saf_search(params, channels, saf)?;
            Ok(Some(rate))
        }
    }
}

/// Execute the configured sweep. Deterministic: the same config always
/// produces the same result, bit for bit.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;

    if cfg.scenario == Scenario::Convergence {
        let geometry = cfg.geometry.realize(cfg.params.relay_count)?;
        let channels = draw_channels(&geometry, cfg.base_seed)?;
        let (_, trace) = solve_pa(&cfg.params, &channels, &cfg.penalty, None)?;
        let convergence = ConvergenceTrace {
            rho: trace.iterations.iter().map(|r| r.power_split.clone()).collect(),
            secrecy: trace.iterations.iter().map(|r| r.secrecy_rate).collect(),
        };
        return Ok(SweepResult {
            scenario: cfg.scenario,
            points: Vec::new(),
            convergence: Some(convergence),
        });
    }

    let mut points = Vec::with_capacity(cfg.sweep_values.len());
    for &value in &cfg.sweep_values {
        let params = cfg.params_at(value);
        let geometry = cfg.geometry.realize(params.relay_count)?;
        let mut stats = Vec::with_capacity(cfg.methods.len());
        for &method in &cfg.methods {
            let mut rates = Vec::with_capacity(cfg.realizations);
            let mut failures = 0usize;
            for j in 0..cfg.realizations {
                let channels = draw_channels(&geometry, cfg.base_seed + j as u64)?;
                match run_method(method, &params, &channels, &cfg.penalty, &cfg.saf)? {
                    Some(rate) => rates.push(rate),
                    None => failures += 1,
                }
            }
            let (mean, stderr) = mean_and_stderr(&rates);
            stats.push(MethodStats {
                method,
                mean,
                stderr,
                failures,
                rates,
            });
        }
        points.push(SweepPoint { value, stats });
    }
    Ok(SweepResult {
        scenario: cfg.scenario,
        points,
        convergence: None,
    })
}

/// 12 significant digits, enough for an exact-looking round trip.
fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write the CSV body (header row plus data rows) for a sweep result.
pub fn write_csv<W: Write>(result: &SweepResult, out: &mut W) -> std::io::Result<()> {
    if let Some(tr) = &result.convergence {
        writeln!(out, "iteration,relay_index,rho,secrecy_rate")?;
        for (it, (rho_row, secrecy)) in tr.rho.iter().zip(&tr.secrecy).enumerate() {
            for (relay, &rho) in rho_row.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    it + 1,
                    relay + 1,
                    fmt_float(rho),
                    fmt_float(*secrecy)
                )?;
            }
        }
        return Ok(());
    }
    writeln!(out, "sweep_value,method,mean_secrecy_rate_bits,stderr,failures")?;
    for point in &result.points {
        for s in &point.stats {
            writeln!(
                out,
                "{},{},{},{},{}",
                point.value,
                s.method.as_str(),
                fmt_float(s.mean),
                fmt_float(s.stderr),
                s.failures
            )?;
        }
    }
    Ok(())
}

/// Render the CSV body as a string.
pub fn csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Write the CSV body to a file.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_csv(result, &mut out).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    out.flush().map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
