//! Block-wise penalty function method for joint power-split and beamformer
//! design.
//!
//! The relay power budgets are folded into the objective as a quadratic
//! penalty: f = S(w,rho) - lambda * sum_i residual_i^2, where S is the smooth
//! (unclamped) half rate difference. One outer iteration performs a
//! Gauss-Seidel pass over the blocks -- every w_i (both real coordinates
//! moved jointly), then every rho_i projected onto [0,1], then every psi_i
//! projected onto [0,inf) -- each step sized by the Armijo backtracking rule,
//! so the objective never decreases at fixed lambda. Between iterations
//! lambda grows geometrically until all convergence measures fall below the
//! tolerance.
//!
//! The positive-part clamp of the secrecy rate is applied only when
//! *reporting*: inside the optimizer it would zero the gradient wherever the
//! eavesdropper is ahead and freeze the search.

use num_complex::Complex64;

use crate::baseline::saf_gain;
use crate::error::{Error, Result};
use crate::model::{
    self, assemble_quadratic_forms, constraint_residuals, first_hop_eve_sinr,
    harvested_power_unchecked, rate_destination_from, rate_eavesdropper_from, ChannelSet,
    QuadraticForms, Solution, SystemParams,
};

/// rho is clamped this far below 1 inside gradient evaluation; the
/// sqrt(1-rho) factor has an unbounded one-sided derivative at 1.
const RHO_GRAD_GUARD: f64 = 1e-9;

/// Tolerance for treating a box bound as active when projecting gradients.
const ACTIVE_BOUND_TOL: f64 = 1e-9;

/// The penalty parameter grows only once the current subproblem is roughly
/// stationary: projected gradient within this fraction of
/// sqrt(tolerance) * (1 + |objective|). Growing lambda on every sweep
/// regardless freezes the block updates (their stable stepsizes shrink like
/// 1/lambda) well short of a stationary point.
const INNER_KKT_FRACTION: f64 = 0.25;

/// A converged run must also be approximately stationary, not merely
/// feasible and slow-moving; at large lambda the sweep movement shrinks like
/// 1/lambda whether or not the gradient is small, so movement alone cannot
/// certify a solution. The gradient tolerance scales with sqrt(tolerance),
/// the natural companion of the squared-change measures.
const KKT_STOP_FRACTION: f64 = 0.5;

/// Penalty schedule, Armijo constants and stopping settings.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyConfig {
    /// Initial penalty parameter lambda^0.
    pub lambda0: f64,
    /// Geometric growth factor c >= 1 applied after every non-stopping
    /// outer iteration.
    pub lambda_growth: f64,
    /// Stopping tolerance epsilon; all four convergence measures must fall
    /// below it.
    pub tolerance: f64,
    /// Outer iteration cap K.
    pub max_outer_iters: usize,
    /// First Armijo trial step, in (0,1].
    pub armijo_init: f64,
    /// Backtracking shrink factor beta in (0,1).
    pub armijo_shrink: f64,
    /// Sufficient-increase fraction sigma-hat in (0,1).
    pub armijo_slope: f64,
    /// Trials per line search before giving up with a zero step.
    pub max_backtracks: usize,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            lambda0: 35.0,
            lambda_growth: 1.2,
            tolerance: 1e-6,
            max_outer_iters: 20000,
            armijo_init: 1.0,
            armijo_shrink: 0.5,
            armijo_slope: 1e-4,
            max_backtracks: 40,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 >= 0.0) {
            return Err(Error::invalid("lambda0", "[0, inf)", self.lambda0));
        }
        if !(self.lambda_growth >= 1.0) {
            return Err(Error::invalid("lambda_growth", "[1, inf)", self.lambda_growth));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "(0, inf)", self.tolerance));
        }
        if self.max_outer_iters < 1 {
            return Err(Error::invalid("max_outer_iters", "[1, inf)", self.max_outer_iters));
        }
        if !(self.armijo_init > 0.0 && self.armijo_init <= 1.0) {
            return Err(Error::invalid("armijo_init", "(0,1]", self.armijo_init));
        }
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return Err(Error::invalid("armijo_shrink", "(0,1)", self.armijo_shrink));
        }
        if !(self.armijo_slope > 0.0 && self.armijo_slope < 1.0) {
            return Err(Error::invalid("armijo_slope", "(0,1)", self.armijo_slope));
        }
        if self.max_backtracks < 1 {
            return Err(Error::invalid("max_backtracks", "[1, inf)", self.max_backtracks));
        }
        Ok(())
    }
}

/// Partial derivatives of the penalty objective with respect to every scalar
/// block coordinate. Complex entries pack (d/dRe, d/dIm) of the matching w_i.
#[derive(Debug, Clone)]
pub struct GradientBundle {
    pub w: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub psi: Vec<f64>,
}

impl GradientBundle {
    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|g| g.norm_sqr() == 0.0)
            && self.rho.iter().all(|&g| g == 0.0)
            && self.psi.iter().all(|&g| g == 0.0)
    }
}

/// One outer iteration of the solve, with full variable snapshots so traces
/// can drive convergence plots.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// Penalty objective after the sweep (at this iteration's lambda).
    pub objective: f64,
    /// Unclamped secrecy term 0.5 (R_d - R_e).
    pub secrecy_term: f64,
    /// Reported secrecy rate (positive part applied).
    pub secrecy_rate: f64,
    /// Total squared constraint residual.
    pub residual_sq: f64,
    /// Penalty parameter used by this sweep.
    pub lambda: f64,
    /// Objective value after each single block update (3N entries);
    /// nondecreasing within the sweep by the Armijo acceptance rule.
    pub update_objectives: Vec<f64>,
    pub beamformer: Vec<Complex64>,
    pub power_split: Vec<f64>,
    pub slack: Vec<f64>,
}

/// Full history of a solve.
#[derive(Debug, Clone, Default)]
pub struct SolveTrace {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
}

impl SolveTrace {
    /// Reported secrecy rate of the last iteration.
    pub fn final_secrecy_rate(&self) -> f64 {
        self.iterations.last().map_or(0.0, |r| r.secrecy_rate)
    }

    /// Lambda used by the final sweep.
    pub fn final_lambda(&self) -> f64 {
        self.iterations.last().map_or(0.0, |r| r.lambda)
    }
}

/// Reusable objective evaluator: the rate matrices are channel constants, so
/// between evaluations only the B_rho diagonal is refreshed.
struct Evaluator<'a> {
    params: &'a SystemParams,
    channels: &'a ChannelSet,
    first_hop_sinr: f64,
    qf: QuadraticForms,
}

impl<'a> Evaluator<'a> {
    fn new(params: &'a SystemParams, channels: &'a ChannelSet) -> Self {
        let n = channels.relay_count();
        Evaluator {
            params,
            channels,
            first_hop_sinr: first_hop_eve_sinr(params, channels),
            qf: assemble_quadratic_forms(params, channels, &vec![0.0; n]),
        }
    }

    fn objective(&mut self, w: &[Complex64], rho: &[f64], psi: &[f64], lambda: f64) -> f64 {
        for (bi, &ri) in self.qf.b.iter_mut().zip(rho) {
            *bi = (1.0 - ri).max(0.0).sqrt();
        }
        let rd = rate_destination_from(&self.qf, self.params.noise_power, w);
        let re = rate_eavesdropper_from(&self.qf, self.first_hop_sinr, self.params.noise_power, w);
        let mut penalty = 0.0;
        for i in 0..w.len() {
            let r = model::residual_entry(self.params, self.channels, i, w[i], rho[i], psi[i]);
            penalty += r * r;
        }
        0.5 * (rd - re) - lambda * penalty
    }
}

/// Penalty objective f(w, rho, psi; lambda) = 0.5 (R_d - R_e) - lambda sum r_i^2.
///
/// At any feasible point the value equals the smooth secrecy term exactly.
pub fn penalty_objective(
    params: &SystemParams,
    channels: &ChannelSet,
    sol: &Solution,
    lambda: f64,
) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::invalid("lambda", "[0, inf)", lambda));
    }
    sol.validate(channels.relay_count())?;
    let mut ev = Evaluator::new(params, channels);
    Ok(ev.objective(&sol.beamformer, &sol.power_split, &sol.slack, lambda))
}

/// Analytic partial derivatives of the penalty objective at `sol`.
pub fn grad_blocks(
    params: &SystemParams,
    channels: &ChannelSet,
    sol: &Solution,
    lambda: f64,
) -> GradientBundle {
    let n = channels.relay_count();
    let w = &sol.beamformer;
    let psi = &sol.slack;
    let s2 = params.noise_power;
    let ps = params.source_power;
    let pd = params.an_power;
    let ln2 = std::f64::consts::LN_2;

    // rho clamped away from 1 so 1/sqrt(1-rho) stays finite
    let rho: Vec<f64> = sol
        .power_split
        .iter()
        .map(|&r| r.clamp(0.0, 1.0 - RHO_GRAD_GUARD))
        .collect();
    let b: Vec<f64> = rho.iter().map(|&r| (1.0 - r).sqrt()).collect();

    let g1v: Vec<Complex64> = (0..n)
        .map(|i| channels.relay_dest[i] * channels.source_relay[i])
        .collect();
    let g2v: Vec<Complex64> = (0..n)
        .map(|i| channels.relay_eve[i] * channels.source_relay[i])
        .collect();
    let g3v: Vec<Complex64> = (0..n)
        .map(|i| channels.relay_eve[i] * channels.dest_relay[i])
        .collect();
    let q1: Vec<f64> = (0..n).map(|i| channels.relay_dest[i].norm_sqr() * s2).collect();
    let q2: Vec<f64> = (0..n).map(|i| channels.relay_eve[i].norm_sqr() * s2).collect();

    let dot = |g: &[Complex64]| -> Complex64 {
        (0..n).map(|j| g[j].conj() * b[j] * w[j]).sum()
    };
    let z1 = dot(&g1v);
    let z2 = dot(&g2v);
    let z3 = dot(&g3v);

    // destination-rate pieces: A/Dd is the SINR
    let num_d = ps * z1.norm_sqr();
    let den_d: f64 = (0..n)
        .map(|j| (b[j] * b[j] + 1.0) * w[j].norm_sqr() * q1[j])
        .sum::<f64>()
        + s2;
    // eavesdropper second-hop pieces
    let num_e = ps * z2.norm_sqr();
    let den_e: f64 = pd * z3.norm_sqr()
        + (0..n)
            .map(|j| (b[j] * b[j] + 1.0) * w[j].norm_sqr() * q2[j])
            .sum::<f64>()
        + s2;
    let s1 = first_hop_eve_sinr(params, channels);

    // d R_d = (Dd dA - A dDd) / (ln2 Dd (Dd + A)); the eavesdropper rate has
    // the extra constant 1 + S1 multiplying its denominator inside the log
    let dd_scale = 1.0 / (ln2 * den_d * (den_d + num_d));
    let de_scale = 1.0 / (ln2 * ((1.0 + s1) * den_e * den_e + num_e * den_e));

    let mut grad = GradientBundle {
        w: vec![Complex64::new(0.0, 0.0); n],
        rho: vec![0.0; n],
        psi: vec![0.0; n],
    };

    for i in 0..n {
        // packed complex gradients (d/dRe + j d/dIm) of each quadratic piece
        let d_num_d = 2.0 * ps * z1 * g1v[i] * b[i];
        let d_den_d = 2.0 * (b[i] * b[i] + 1.0) * q1[i] * w[i];
        let d_num_e = 2.0 * ps * z2 * g2v[i] * b[i];
        let d_den_e =
            2.0 * pd * z3 * g3v[i] * b[i] + 2.0 * (b[i] * b[i] + 1.0) * q2[i] * w[i];

        let d_rd = (d_num_d * den_d - d_den_d * num_d) * dd_scale;
        let d_re = (d_num_e * den_e - d_den_e * num_e) * de_scale;

        let residual = model::residual_entry(params, channels, i, w[i], sol.power_split[i], psi[i]);
        let t_i = model::forwarded_power_coeff(params, channels, i, sol.power_split[i]);
        let d_res_w = 4.0 * lambda * residual * t_i * w[i];

        grad.w[i] = 0.5 * (d_rd - d_re) - d_res_w;

        // rho partials: the b-dependent pieces differentiate through
        // db/drho = -1/(2b)
        let r_num_d = -(ps / b[i]) * (z1.conj() * g1v[i].conj() * w[i]).re;
        let r_den_d = -q1[i] * w[i].norm_sqr();
        let r_num_e = -(ps / b[i]) * (z2.conj() * g2v[i].conj() * w[i]).re;
        let r_den_e = -(pd / b[i]) * (z3.conj() * g3v[i].conj() * w[i]).re
            - q2[i] * w[i].norm_sqr();

        let r_rd = (r_num_d * den_d - r_den_d * num_d) * dd_scale;
        let r_re = (r_num_e * den_e - r_den_e * num_e) * de_scale;

        let link_power = ps * channels.source_relay[i].norm_sqr()
            + pd * channels.dest_relay[i].norm_sqr();
        let d_res_rho = -(w[i].norm_sqr() + params.efficiency) * (link_power + s2);
        grad.rho[i] = 0.5 * (r_rd - r_re) - 2.0 * lambda * residual * d_res_rho;

        grad.psi[i] = -2.0 * lambda * residual;
    }
    grad
}

/// Armijo backtracking along a scalar coordinate.
///
/// Tries steps alpha_init * shrink^m, m = 0,1,..., and returns the first
/// (largest) one whose objective increase reaches
/// `armijo_slope * alpha * slope`, where `slope` is the directional
/// derivative at `x0` supplied by the caller. Returns 0 when every trial
/// fails -- a stalled block, not an error. Trial-point projection, when
/// needed, lives inside `objective`.
pub fn armijo_search<F: FnMut(f64) -> f64>(
    mut objective: F,
    x0: f64,
    direction: f64,
    slope: f64,
    cfg: &PenaltyConfig,
) -> f64 {
    debug_assert!(slope >= 0.0, "ascent slope expected, got {slope}");
    let f0 = objective(x0);
    let mut alpha = cfg.armijo_init;
    for _ in 0..cfg.max_backtracks {
        let trial = objective(x0 + alpha * direction);
        if trial - f0 >= cfg.armijo_slope * alpha * slope {
            return alpha;
        }
        alpha *= cfg.armijo_shrink;
    }
    0.0
}

/// One Gauss-Seidel pass over all blocks at fixed lambda: w_1..w_N, then
/// rho_1..rho_N (projected onto [0,1]), then psi_1..psi_N (projected onto
/// [0,inf)). Every update sees the freshest values of all other blocks.
///
/// Returns the objective after each single block update (3N values); the
/// sequence is nondecreasing because only Armijo-accepted steps move.
pub fn block_sweep(
    params: &SystemParams,
    channels: &ChannelSet,
    sol: &mut Solution,
    lambda: f64,
    cfg: &PenaltyConfig,
) -> Vec<f64> {
    let n = channels.relay_count();
    let mut ev = Evaluator::new(params, channels);
    let mut log = Vec::with_capacity(3 * n);

    // beamformer pass: both real coordinates of w_i move jointly along the
    // gradient, with a single scalar stepsize
    let mut w_buf = sol.beamformer.clone();
    for i in 0..n {
        let g = grad_blocks(params, channels, sol, lambda).w[i];
        let slope = g.norm_sqr();
        let w0 = sol.beamformer[i];
        w_buf.copy_from_slice(&sol.beamformer);
        let alpha = {
            let rho = &sol.power_split;
            let psi = &sol.slack;
            armijo_search(
                |t: f64| {
                    w_buf[i] = w0 + g * t;
                    ev.objective(&w_buf, rho, psi, lambda)
                },
                0.0,
                1.0,
                slope,
                cfg,
            )
        };
        sol.beamformer[i] = w0 + g * alpha;
        log.push(ev.objective(&sol.beamformer, &sol.power_split, &sol.slack, lambda));
    }

    let mut rho_buf = sol.power_split.clone();
    for i in 0..n {
        let d = grad_blocks(params, channels, sol, lambda).rho[i];
        let r0 = sol.power_split[i];
        rho_buf.copy_from_slice(&sol.power_split);
        // a gradient pointing out of the box at an active bound cannot move
        // the projected trial anywhere; skip the search
        let pinned = (r0 + cfg.armijo_init * d).clamp(0.0, 1.0) == r0;
        if !pinned {
            let alpha = {
                let w = &sol.beamformer;
                let psi = &sol.slack;
                armijo_search(
                    |x: f64| {
                        rho_buf[i] = x.clamp(0.0, 1.0);
                        ev.objective(w, &rho_buf, psi, lambda)
                    },
                    r0,
                    d,
                    d * d,
                    cfg,
                )
            };
            sol.power_split[i] = (r0 + alpha * d).clamp(0.0, 1.0);
        }
        log.push(ev.objective(&sol.beamformer, &sol.power_split, &sol.slack, lambda));
    }

    let mut psi_buf = sol.slack.clone();
    for i in 0..n {
        let d = grad_blocks(params, channels, sol, lambda).psi[i];
        let p0 = sol.slack[i];
        psi_buf.copy_from_slice(&sol.slack);
        let pinned = (p0 + cfg.armijo_init * d).max(0.0) == p0;
        if !pinned {
            let alpha = {
                let w = &sol.beamformer;
                let rho = &sol.power_split;
                armijo_search(
                    |x: f64| {
                        psi_buf[i] = x.max(0.0);
                        ev.objective(w, rho, &psi_buf, lambda)
                    },
                    p0,
                    d,
                    d * d,
                    cfg,
                )
            };
            sol.slack[i] = (p0 + alpha * d).max(0.0);
        }
        log.push(ev.objective(&sol.beamformer, &sol.power_split, &sol.slack, lambda));
    }
    log
}

/// Feasible starting point: rho_i = 0.1, beamformers at half the SAF gain
/// co-phased toward the destination, slack absorbing the unused budget.
///
/// Half gain means the transmit power is a quarter of the harvested power,
/// so the slack is nonnegative by construction.
pub fn feasible_initialization(params: &SystemParams, channels: &ChannelSet) -> Result<Solution> {
    let n = channels.relay_count();
    let rho0 = 0.1;
    let mut sol = Solution::zeros(n);
    for i in 0..n {
        let theta = saf_gain(params, channels, i, rho0)?;
        let phase = (channels.relay_dest[i] * channels.source_relay[i]).arg();
        sol.beamformer[i] = Complex64::from_polar(0.5 * theta, phase);
        sol.power_split[i] = rho0;
        let tx = sol.beamformer[i].norm_sqr()
            * model::forwarded_power_coeff(params, channels, i, rho0);
        let harvested = harvested_power_unchecked(params, channels, i, rho0);
        sol.slack[i] = (harvested - tx).max(0.0);
    }
    Ok(sol)
}

/// ||new - old||^2 / ||new||^2 with the conventions: zero movement counts as
/// zero, movement onto an all-zero vector as infinite.
fn rel_change_sq(new: &[f64], old: &[f64]) -> f64 {
    let num: f64 = new.iter().zip(old).map(|(a, b)| (a - b) * (a - b)).sum();
    if num == 0.0 {
        return 0.0;
    }
    let den: f64 = new.iter().map(|a| a * a).sum();
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn rel_change_sq_complex(new: &[Complex64], old: &[Complex64]) -> f64 {
    let num: f64 = new.iter().zip(old).map(|(a, b)| (a - b).norm_sqr()).sum();
    if num == 0.0 {
        return 0.0;
    }
    let den: f64 = new.iter().map(|a| a.norm_sqr()).sum();
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Run the outer loop: one block sweep per iteration, then the stopping test.
///
/// Stopping requires *all four* measures (relative squared changes of w, rho
/// and psi, plus the total squared residual) to be at most the tolerance.
/// On a non-stop the penalty parameter grows by `lambda_growth`, but only
/// once the sweep has driven the projected gradient below a small fraction
/// of the objective scale -- the usual penalty-method schedule of solving
/// each penalized subproblem before tightening it.
///
/// When the iteration cap is exhausted the trace is flagged not converged and
/// the returned point is the best recorded iterate: the feasible one with
/// the highest reported secrecy rate, or failing any feasible iterate, the
/// one with the smallest residual.
pub fn solve_pa(
    params: &SystemParams,
    channels: &ChannelSet,
    cfg: &PenaltyConfig,
    init: Option<Solution>,
) -> Result<(Solution, SolveTrace)> {
    params.validate()?;
    cfg.validate()?;
    let n = channels.relay_count();
    if params.relay_count != n {
        return Err(Error::LengthMismatch {
            what: "channels".into(),
            got: n,
            expected: params.relay_count,
        });
    }
    let mut sol = match init {
        Some(s) => {
            s.validate(n)?;
            s
        }
        None => feasible_initialization(params, channels)?,
    };

    let mut trace = SolveTrace::default();
    let mut lambda = cfg.lambda0;
    for _ in 0..cfg.max_outer_iters {
        let prev = sol.clone();
        let update_objectives = block_sweep(params, channels, &mut sol, lambda, cfg);

        let residual_sq: f64 = constraint_residuals(params, channels, &sol)
            .iter()
            .map(|r| r * r)
            .sum();
        let secrecy_term = 0.5
            * (model::rate_destination(params, channels, &sol.beamformer, &sol.power_split)
                - model::rate_eavesdropper(params, channels, &sol.beamformer, &sol.power_split));
        let objective = *update_objectives.last().expect("sweep logs 3N objectives");

        trace.iterations.push(IterationRecord {
            objective,
            secrecy_term,
            secrecy_rate: secrecy_term.max(0.0),
            residual_sq,
            lambda,
            update_objectives,
            beamformer: sol.beamformer.clone(),
            power_split: sol.power_split.clone(),
            slack: sol.slack.clone(),
        });

        let tol = cfg.tolerance;
        let kkt = kkt_residual(params, channels, &sol, lambda);
        let grad_scale = tol.sqrt() * (1.0 + objective.abs());
        let stop = rel_change_sq_complex(&sol.beamformer, &prev.beamformer) <= tol
            && rel_change_sq(&sol.power_split, &prev.power_split) <= tol
            && rel_change_sq(&sol.slack, &prev.slack) <= tol
            && residual_sq <= tol
            && kkt <= KKT_STOP_FRACTION * grad_scale;
        if stop {
            trace.converged = true;
            return Ok((sol, trace));
        }
        if kkt <= INNER_KKT_FRACTION * grad_scale {
            lambda *= cfg.lambda_growth;
        }
    }

    // cap exhausted: fall back to the best recorded iterate
    let best = trace
        .iterations
        .iter()
        .filter(|r| r.residual_sq <= cfg.tolerance)
        .max_by(|a, b| a.secrecy_rate.total_cmp(&b.secrecy_rate))
        .or_else(|| {
            trace
                .iterations
                .iter()
                .min_by(|a, b| a.residual_sq.total_cmp(&b.residual_sq))
        })
        .expect("at least one iteration ran");
    let sol = Solution {
        beamformer: best.beamformer.clone(),
        power_split: best.power_split.clone(),
        slack: best.slack.clone(),
    };
    Ok((sol, trace))
}

/// Norm of the projected gradient of the penalty objective: components that
/// push against an active bound (rho at 0 or 1, psi at 0) are zeroed. Small
/// values indicate approximate stationarity of the penalized problem.
pub fn kkt_residual(
    params: &SystemParams,
    channels: &ChannelSet,
    sol: &Solution,
    lambda: f64,
) -> f64 {
    let g = grad_blocks(params, channels, sol, lambda);
    let mut sum = 0.0;
    for i in 0..channels.relay_count() {
        sum += g.w[i].norm_sqr();
        let rho = sol.power_split[i];
        let blocked_low = rho <= ACTIVE_BOUND_TOL && g.rho[i] < 0.0;
        let blocked_high = rho >= 1.0 - ACTIVE_BOUND_TOL && g.rho[i] > 0.0;
        if !(blocked_low || blocked_high) {
            sum += g.rho[i] * g.rho[i];
        }
        if !(sol.slack[i] <= ACTIVE_BOUND_TOL && g.psi[i] < 0.0) {
            sum += g.psi[i] * g.psi[i];
        }
    }
    sum.sqrt()
}
