//! Fast built-in verification of the numerics.
//!
//! Four checks that catch the mistakes this kind of code actually makes:
//! analytic gradients against central finite differences, the quadratic-form
//! rates against direct scalar-sum recomputation, the penalty solver against
//! a brute-force grid optimum in the single-relay case, and the SAF
//! power-balance identity. The whole suite runs in seconds.

use num_complex::Complex64;

use crate::baseline::saf_gain;
use crate::model::{
    self, draw_channels, ChannelSet, NetworkGeometry, Solution, SystemParams,
};
use crate::optimizer::{grad_blocks, solve_pa, PenaltyConfig};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Fault-injection hooks so tests can prove the checks have teeth.
#[derive(Debug, Clone, Copy, Default)]
pub struct SelfcheckHooks {
    /// Added to one analytic partial before the finite-difference
    /// comparison; nonzero values must fail the gradient check.
    pub gradient_bias: f64,
}

pub fn run_selfcheck() -> SelfcheckReport {
    run_selfcheck_with(&SelfcheckHooks::default())
}

pub fn run_selfcheck_with(hooks: &SelfcheckHooks) -> SelfcheckReport {
    SelfcheckReport {
        checks: vec![
            gradient_check(hooks.gradient_bias),
            rate_equivalence_check(),
            single_relay_oracle_check(),
            saf_power_balance_check(),
        ],
    }
}

fn default_params(n: usize) -> SystemParams {
    SystemParams {
        source_power: model::dbm_to_watts(40.0),
        an_power: model::dbm_to_watts(40.0),
        noise_power: model::dbm_to_watts(-40.0),
        efficiency: 0.5,
        relay_count: n,
    }
}

fn seeded_channels(n: usize, seed: u64) -> ChannelSet {
    draw_channels(&NetworkGeometry::default_layout(n), seed)
        .expect("default geometry is valid")
}

/// Deterministic pseudo-random interior point at the physical scale of the
/// instance.
pub fn probe_solution(params: &SystemParams, channels: &ChannelSet, seed: u64) -> Solution {
    let n = channels.relay_count();
    let mut sol = Solution::zeros(n);
    for i in 0..n {
        let theta = saf_gain(params, channels, i, 0.5).expect("rho = 0.5 is valid");
        let mag = theta * (0.2 + 0.8 * frac(seed as f64 * 0.731 + i as f64 * 1.37));
        let phase = frac(seed as f64 * 0.389 + i as f64 * 2.11) * std::f64::consts::TAU;
        sol.beamformer[i] = Complex64::from_polar(mag.max(1e-6), phase);
        sol.power_split[i] = 0.05 + 0.9 * frac(seed as f64 * 0.617 + i as f64 * 0.91);
        let harvested =
            model::harvested_power(params, channels, i, sol.power_split[i]).expect("valid rho");
        sol.slack[i] = harvested * frac(seed as f64 * 0.253 + i as f64 * 1.73);
    }
    sol
}

fn frac(x: f64) -> f64 {
    (x.sin() * 43758.5453).fract().abs()
}

/// Central finite difference of the penalty objective along one coordinate.
fn central_difference(
    params: &SystemParams,
    channels: &ChannelSet,
    sol: &Solution,
    lambda: f64,
    poke: &dyn Fn(&mut Solution, f64),
    x: f64,
) -> f64 {
    let h = 1e-6 * x.abs().max(1.0);
    let mut hi = sol.clone();
    poke(&mut hi, x + h);
    let mut lo = sol.clone();
    poke(&mut lo, x - h);
    let f_hi = raw_objective(params, channels, &hi, lambda);
    let f_lo = raw_objective(params, channels, &lo, lambda);
    (f_hi - f_lo) / (2.0 * h)
}

/// Objective evaluation that tolerates slack pushed below zero by the nudge.
fn raw_objective(params: &SystemParams, channels: &ChannelSet, sol: &Solution, lambda: f64) -> f64 {
    let s = 0.5
        * (model::rate_destination(params, channels, &sol.beamformer, &sol.power_split)
            - model::rate_eavesdropper(params, channels, &sol.beamformer, &sol.power_split));
    let v: f64 = model::constraint_residuals(params, channels, sol)
        .iter()
        .map(|r| r * r)
        .sum();
    s - lambda * v
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

fn gradient_check(bias: f64) -> CheckOutcome {
    let lambda = 35.0;
    let mut worst = 0.0f64;
    let points = 50;
    for seed in 0..points {
        let n = (seed % 3 + 1) as usize;
        let params = default_params(n);
        let channels = seeded_channels(n, seed);
        let mut sol = probe_solution(&params, &channels, seed + 1000);
        for r in sol.power_split.iter_mut() {
            *r = r.clamp(0.05, 0.95);
        }
        let mut grad = grad_blocks(&params, &channels, &sol, lambda);
        grad.rho[0] += bias;
        for i in 0..n {
            let d = central_difference(
                &params, &channels, &sol, lambda,
                &|s: &mut Solution, x| s.beamformer[i].re = x,
                sol.beamformer[i].re,
            );
            worst = worst.max(rel_err(grad.w[i].re, d));
            let d = central_difference(
                &params, &channels, &sol, lambda,
                &|s: &mut Solution, x| s.beamformer[i].im = x,
                sol.beamformer[i].im,
            );
            worst = worst.max(rel_err(grad.w[i].im, d));
            let d = central_difference(
                &params, &channels, &sol, lambda,
                &|s: &mut Solution, x| s.power_split[i] = x,
                sol.power_split[i],
            );
            worst = worst.max(rel_err(grad.rho[i], d));
            let d = central_difference(
                &params, &channels, &sol, lambda,
                &|s: &mut Solution, x| s.slack[i] = x,
                sol.slack[i],
            );
            worst = worst.max(rel_err(grad.psi[i], d));
        }
    }
    CheckOutcome {
        name: "gradient-vs-finite-difference",
        passed: worst <= 1e-5,
        detail: format!("{points} points, worst relative error {worst:.3e} (limit 1e-5)"),
    }
}

/// Destination rate recomputed from the coherent scalar sums instead of the
/// assembled matrices.
pub fn scalar_rate_destination(
    params: &SystemParams,
    channels: &ChannelSet,
    w: &[Complex64],
    rho: &[f64],
) -> f64 {
    let s2 = params.noise_power;
    let n = channels.relay_count();
    let mut signal_amp = Complex64::new(0.0, 0.0);
    let mut relay_noise = 0.0;
    let mut conv_noise = 0.0;
    for i in 0..n {
        let b = (1.0 - rho[i]).max(0.0).sqrt();
        signal_amp += b * w[i].conj() * channels.relay_dest[i] * channels.source_relay[i];
        relay_noise += (1.0 - rho[i]).max(0.0) * w[i].norm_sqr() * channels.relay_dest[i].norm_sqr();
        conv_noise += w[i].norm_sqr() * channels.relay_dest[i].norm_sqr();
    }
    let num = params.source_power * signal_amp.norm_sqr();
    let den = s2 * relay_noise + s2 * conv_noise + s2;
    (1.0 + num / den).log2()
}

/// Eavesdropper rate recomputed the same way (first-hop SINR plus the
/// forwarded-signal SINR with the forwarded AN in its denominator).
pub fn scalar_rate_eavesdropper(
    params: &SystemParams,
    channels: &ChannelSet,
    w: &[Complex64],
    rho: &[f64],
) -> f64 {
    let s2 = params.noise_power;
    let n = channels.relay_count();
    let first_hop = params.source_power * channels.source_eve.norm_sqr()
        / (params.an_power * channels.dest_eve.norm_sqr() + s2);
    let mut signal_amp = Complex64::new(0.0, 0.0);
    let mut an_amp = Complex64::new(0.0, 0.0);
    let mut relay_noise = 0.0;
    let mut conv_noise = 0.0;
    for i in 0..n {
        let b = (1.0 - rho[i]).max(0.0).sqrt();
        signal_amp += b * w[i].conj() * channels.relay_eve[i] * channels.source_relay[i];
        an_amp += b * w[i].conj() * channels.relay_eve[i] * channels.dest_relay[i];
        relay_noise += (1.0 - rho[i]).max(0.0) * w[i].norm_sqr() * channels.relay_eve[i].norm_sqr();
        conv_noise += w[i].norm_sqr() * channels.relay_eve[i].norm_sqr();
    }
    let num = params.source_power * signal_amp.norm_sqr();
    let den = params.an_power * an_amp.norm_sqr() + s2 * relay_noise + s2 * conv_noise + s2;
    (1.0 + first_hop + num / den).log2()
}

fn rate_equivalence_check() -> CheckOutcome {
    let mut worst = 0.0f64;
    let instances = 100;
    for seed in 0..instances {
        let n = (seed % 5 + 1) as usize;
        let params = default_params(n);
        let channels = seeded_channels(n, seed + 5000);
        let sol = probe_solution(&params, &channels, seed);
        let rd = model::rate_destination(&params, &channels, &sol.beamformer, &sol.power_split);
        let rd_scalar =
            scalar_rate_destination(&params, &channels, &sol.beamformer, &sol.power_split);
        let re = model::rate_eavesdropper(&params, &channels, &sol.beamformer, &sol.power_split);
        let re_scalar =
            scalar_rate_eavesdropper(&params, &channels, &sol.beamformer, &sol.power_split);
        worst = worst
            .max((rd - rd_scalar).abs() / rd.abs().max(1e-12))
            .max((re - re_scalar).abs() / re.abs().max(1e-12));
    }
    CheckOutcome {
        name: "rate-forms-vs-scalar-sums",
        passed: worst <= 1e-10,
        detail: format!("{instances} instances, worst relative error {worst:.3e} (limit 1e-10)"),
    }
}

/// Brute-force optimum for one relay: search the (rho, budget-fraction)
/// grid; the beamformer phase is irrelevant with N = 1.
pub fn single_relay_grid_optimum(
    params: &SystemParams,
    channels: &ChannelSet,
    step: f64,
) -> f64 {
    assert_eq!(channels.relay_count(), 1);
    let mut best = 0.0f64;
    let rho_points = ((1.0 - step) / step + 1e-9).floor() as usize;
    let frac_points = (1.0 / step + 1e-9).round() as usize;
    for k in 1..=rho_points {
        let rho = k as f64 * step;
        let budget = saf_gain(params, channels, 0, rho).expect("valid rho");
        for m in 0..=frac_points {
            let frac = m as f64 * step;
            let w = Complex64::new(frac.sqrt() * budget, 0.0);
            let rate = model::secrecy_rate(params, channels, &[w], &[rho]);
            best = best.max(rate);
        }
    }
    best
}

fn single_relay_oracle_check() -> CheckOutcome {
    let params = default_params(1);
    let cfg = PenaltyConfig::default();
    let mut detail = String::new();
    let mut passed = true;
    for seed in 1..=5u64 {
        let channels = seeded_channels(1, seed);
        let (sol, trace) =
            solve_pa(&params, &channels, &cfg, None).expect("valid configuration");
        let pa = model::secrecy_rate(&params, &channels, &sol.beamformer, &sol.power_split);
        let oracle = single_relay_grid_optimum(&params, &channels, 0.01);
        let ok = trace.converged && pa >= 0.95 * oracle;
        if !ok {
            passed = false;
        }
        detail.push_str(&format!(
            "seed {seed}: pa {pa:.4} vs grid {oracle:.4}{}; ",
            if ok { "" } else { " MISS" }
        ));
    }
    CheckOutcome {
        name: "single-relay-grid-oracle",
        passed,
        detail,
    }
}

fn saf_power_balance_check() -> CheckOutcome {
    let mut worst = 0.0f64;
    let pairs = 1000;
    for seed in 0..pairs {
        let n = (seed % 4 + 1) as usize;
        let params = default_params(n);
        let channels = seeded_channels(n, seed + 9000);
        let i = (seed as usize / 4) % n;
        let rho = 0.02 + 0.96 * frac(seed as f64 * 0.811);
        let theta = saf_gain(&params, &channels, i, rho).expect("valid rho");
        let tx = model::relay_tx_power(&params, &channels, i, Complex64::new(theta, 0.0), rho)
            .expect("valid rho");
        let harvested = model::harvested_power(&params, &channels, i, rho).expect("valid rho");
        worst = worst.max((tx - harvested).abs() / harvested.max(1e-300));
    }
    CheckOutcome {
        name: "saf-power-balance",
        passed: worst <= 1e-12,
        detail: format!("{pairs} pairs, worst relative error {worst:.3e} (limit 1e-12)"),
    }
}
