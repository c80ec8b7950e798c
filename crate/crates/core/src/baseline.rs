//! Simple amplify-and-forward (SAF) benchmark.
//!
//! Each relay applies a real, nonnegative gain theta_i that spends exactly the
//! harvested energy -- no phase alignment. The power-split ratios are found by
//! searching a fixed rho grid: a full N-dimensional grid for N <= 2, cyclic
//! per-coordinate search otherwise (joint exhaustive search grows
//! exponentially with N).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    self, forwarded_power_coeff, harvested_power_unchecked, ChannelSet, SystemParams,
};

/// How the rho grid is explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Joint search over the full grid; only honored for N <= 2.
    FullGrid,
    /// Optimize one coordinate at a time over the grid, cycling until no
    /// coordinate moves or `max_cycles` is hit.
    CyclicCoordinate,
}

/// Grid-search settings for the SAF benchmark.
#[derive(Debug, Clone, Copy)]
pub struct SafConfig {
    /// Grid spacing; the grid covers [grid_step, 1 - grid_step] inclusive.
    pub grid_step: f64,
    pub search_mode: SearchMode,
    /// Cycle cap for the cyclic mode.
    pub max_cycles: usize,
}

impl Default for SafConfig {
    fn default() -> Self {
        SafConfig {
            grid_step: 0.01,
            search_mode: SearchMode::FullGrid,
            max_cycles: 10,
        }
    }
}

impl SafConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(Error::invalid("grid_step", "(0, 0.5]", self.grid_step));
        }
        if self.max_cycles < 1 {
            return Err(Error::invalid("max_cycles", "[1, inf)", self.max_cycles));
        }
        Ok(())
    }

    /// Grid points k * grid_step for k = 1.. while inside [step, 1 - step].
    pub fn grid(&self) -> Vec<f64> {
        let m = ((1.0 - self.grid_step) / self.grid_step + 1e-9).floor() as usize;
        (1..=m).map(|k| k as f64 * self.grid_step).collect()
    }
}

/// SAF amplification gain:
/// theta_i = sqrt(P_i^EH / [(1-rho_i)(P_s|h_si|^2 + P_d|h_di|^2 + sigma^2) + sigma^2]).
///
/// By construction the induced relay transmit power equals the harvested
/// power exactly.
pub fn saf_gain(
    params: &SystemParams,
    channels: &ChannelSet,
    relay_index: usize,
    rho_i: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho_i) {
        return Err(Error::invalid("rho_i", "[0,1]", rho_i));
    }
    let den = forwarded_power_coeff(params, channels, relay_index, rho_i);
    if den == 0.0 {
        // only reachable with rho_i = 1 and sigma^2 = 0
        return Err(Error::invalid(
            "rho_i",
            "[0,1) when noise_power = 0",
            rho_i,
        ));
    }
    let harvested = harvested_power_unchecked(params, channels, relay_index, rho_i);
    Ok((harvested / den).sqrt())
}

/// Secrecy rate of the SAF scheme at a given split vector: w_i = theta_i(rho_i).
pub fn saf_secrecy_rate(params: &SystemParams, channels: &ChannelSet, rho: &[f64]) -> Result<f64> {
    let w: Vec<Complex64> = (0..channels.relay_count())
        .map(|i| saf_gain(params, channels, i, rho[i]).map(|t| Complex64::new(t, 0.0)))
        .collect::<Result<_>>()?;
    Ok(model::secrecy_rate(params, channels, &w, rho))
}

/// Search the rho grid for the best SAF operating point.
///
/// Returns the chosen splits and the secrecy rate they achieve. Ties break
/// toward the lexicographically smallest split vector.
pub fn saf_search(
    params: &SystemParams,
    channels: &ChannelSet,
    cfg: &SafConfig,
) -> Result<(Vec<f64>, f64)> {
    cfg.validate()?;
    let n = channels.relay_count();
    let grid = cfg.grid();
    if grid.is_empty() {
        return Err(Error::invalid("grid_step", "(0, 0.5]", cfg.grid_step));
    }
    let rho = if n <= 2 && cfg.search_mode == SearchMode::FullGrid {
        full_grid_search(params, channels, &grid, n)?
    } else {
        cyclic_search(params, channels, &grid, n, cfg.max_cycles)?
    };
    let rate = saf_secrecy_rate(params, channels, &rho)?;
    Ok((rho, rate))
}

fn full_grid_search(
    params: &SystemParams,
    channels: &ChannelSet,
    grid: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    debug_assert!(n <= 2);
    let mut best_rho = vec![grid[0]; n];
    let mut best = saf_secrecy_rate(params, channels, &best_rho)?;
    let mut cand = vec![0.0; n];
    if n == 1 {
        for &r in grid {
            cand[0] = r;
            let v = saf_secrecy_rate(params, channels, &cand)?;
            if v > best {
                best = v;
                best_rho.copy_from_slice(&cand);
            }
        }
    } else {
        for &r0 in grid {
            for &r1 in grid {
                cand[0] = r0;
                cand[1] = r1;
                let v = saf_secrecy_rate(params, channels, &cand)?;
                if v > best {
                    best = v;
                    best_rho.copy_from_slice(&cand);
                }
            }
        }
    }
    Ok(best_rho)
}

fn cyclic_search(
    params: &SystemParams,
    channels: &ChannelSet,
    grid: &[f64],
    n: usize,
    max_cycles: usize,
) -> Result<Vec<f64>> {
    // start every coordinate at the grid point closest to 0.1, the
    // conventional initial split
    let start = grid
        .iter()
        .copied()
        .min_by(|a, b| {
            (a - 0.1)
                .abs()
                .partial_cmp(&(b - 0.1).abs())
                .unwrap()
        })
        .unwrap();
    let mut rho = vec![start; n];
    for _ in 0..max_cycles {
        let mut moved = false;
        for i in 0..n {
            // smallest grid point achieving the coordinate maximum
            let mut best_val = f64::NEG_INFINITY;
            let mut best_r = rho[i];
            for &r in grid {
                let mut cand = rho.clone();
                cand[i] = r;
                let v = saf_secrecy_rate(params, channels, &cand)?;
                if v > best_val {
                    best_val = v;
                    best_r = r;
                }
            }
            if best_r != rho[i] {
                rho[i] = best_r;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{draw_channels, relay_tx_power, NetworkGeometry};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(n: usize) -> SystemParams {
        SystemParams {
            source_power: 10.0,
            an_power: 10.0,
            noise_power: 1e-7,
            efficiency: 0.5,
            relay_count: n,
        }
    }

    fn channels(n: usize, seed: u64) -> ChannelSet {
        draw_channels(&NetworkGeometry::default_layout(n), seed).unwrap()
    }

    #[test]
    fn gain_examples() {
        let ch = ChannelSet {
            source_relay: vec![c(1.0, 0.0)],
            dest_relay: vec![c(1.0, 0.0)],
            relay_dest: vec![c(0.0, 0.0)],
            relay_eve: vec![c(0.0, 0.0)],
            source_eve: c(0.0, 0.0),
            dest_eve: c(0.0, 0.0),
        };
        let mut p = params(1);
        p.source_power = 1.0;
        p.an_power = 1.0;
        // no split, no harvest, no gain
        assert_eq!(saf_gain(&p, &ch, 0, 0.0).unwrap(), 0.0);
        // eta=0.5, rho=0.5, unit link powers, sigma^2=0 -> sqrt(0.5)
        let mut p0 = p;
        p0.noise_power = 0.0;
        let theta = saf_gain(&p0, &ch, 0, 0.5).unwrap();
        assert!((theta - 0.5f64.sqrt()).abs() < 1e-12);
        // rho=1 with zero noise is the 0/0 corner
        assert!(saf_gain(&p0, &ch, 0, 1.0).is_err());
    }

    #[test]
    fn gain_saturates_power_budget() {
        // the defining identity: tx power under theta equals harvested power
        for seed in 0..50u64 {
            let ch = channels(3, seed);
            let p = params(3);
            for (i, rho) in [(0usize, 0.05), (1, 0.42), (2, 0.9)] {
                let theta = saf_gain(&p, &ch, i, rho).unwrap();
                let tx = relay_tx_power(&p, &ch, i, c(theta, 0.0), rho).unwrap();
                let eh = p.efficiency
                    * rho
                    * (p.source_power * ch.source_relay[i].norm_sqr()
                        + p.an_power * ch.dest_relay[i].norm_sqr()
                        + p.noise_power);
                assert!((tx - eh).abs() <= 1e-12 * eh.max(1e-300), "seed {seed}");
            }
        }
    }

    #[test]
    fn single_relay_search_matches_brute_force() {
        let ch = channels(1, 17);
        let p = params(1);
        let cfg = SafConfig::default();
        let (rho, rate) = saf_search(&p, &ch, &cfg).unwrap();
        let grid = cfg.grid();
        assert_eq!(grid.len(), 99);
        let mut best = f64::NEG_INFINITY;
        let mut best_r = 0.0;
        for &r in &grid {
            let v = saf_secrecy_rate(&p, &ch, &[r]).unwrap();
            if v > best {
                best = v;
                best_r = r;
            }
        }
        assert_eq!(rho, vec![best_r]);
        assert_eq!(rate, best);
    }

    #[test]
    fn zero_source_power_returns_smallest_grid_point() {
        let ch = channels(2, 3);
        let mut p = params(2);
        p.source_power = 0.0;
        let cfg = SafConfig {
            grid_step: 0.1,
            ..SafConfig::default()
        };
        let (rho, rate) = saf_search(&p, &ch, &cfg).unwrap();
        assert_eq!(rate, 0.0);
        assert_eq!(rho, vec![0.1, 0.1]);
    }

    #[test]
    fn cyclic_never_beats_full_grid() {
        for seed in [2u64, 8, 15] {
            let ch = channels(2, seed);
            let p = params(2);
            let coarse = SafConfig {
                grid_step: 0.1,
                ..SafConfig::default()
            };
            let (_, full) = saf_search(&p, &ch, &coarse).unwrap();
            let cyc_cfg = SafConfig {
                search_mode: SearchMode::CyclicCoordinate,
                ..coarse
            };
            let (rho_cyc, cyc) = saf_search(&p, &ch, &cyc_cfg).unwrap();
            assert!(cyc <= full + 1e-15, "seed {seed}: cyclic {cyc} > full {full}");
            // cyclic output stays on the grid
            for r in rho_cyc {
                let k = (r / 0.1).round();
                assert!((r - k * 0.1).abs() < 1e-12 && (0.1 - 1e-12..=0.9 + 1e-12).contains(&r));
            }
        }
    }

    #[test]
    fn grid_covers_documented_range() {
        let cfg = SafConfig {
            grid_step: 0.1,
            ..SafConfig::default()
        };
        let g = cfg.grid();
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert!((g.last().unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(g.len(), 9);
    }
}
