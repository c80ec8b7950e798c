//! Physical-layer model of a two-hop wireless-powered relay network.
//!
//! A source S talks to a destination D through N single-antenna
//! amplify-and-forward relays. Each relay power-splits its received signal:
//! a fraction `rho_i` is harvested (conversion efficiency `eta`), the rest is
//! amplified by a scalar beamformer `w_i` and forwarded. The destination
//! transmits artificial noise during the first hop, which degrades the idle
//! relay acting as an eavesdropper E and is harvested by the active relays.
//!
//! This module holds every closed-form quantity: channel generation over a
//! d^-2 Rayleigh path-loss model, harvested power, the destination and
//! eavesdropper rates in their quadratic-form representation, relay transmit
//! power and the power-budget residuals. All functions are pure; channel
//! draws are deterministic given a seed.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Convert a dBm figure to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Convert watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Transmit powers, noise floor and energy-conversion efficiency.
///
/// One noise power is shared by every noise source in the network (relay
/// front ends, conversion stages, eavesdropper and destination).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Source transmit power P_s in watts.
    pub source_power: f64,
    /// Artificial-noise transmit power P_d at the destination, in watts.
    pub an_power: f64,
    /// Noise power sigma^2 in watts, shared by all receivers.
    pub noise_power: f64,
    /// Energy conversion efficiency eta in (0,1).
    pub efficiency: f64,
    /// Number of active relays N.
    pub relay_count: usize,
}

impl SystemParams {
    /// Validate the documented ranges, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.source_power >= 0.0) {
            return Err(Error::invalid("source_power", "[0, inf)", self.source_power));
        }
        if !(self.an_power >= 0.0) {
            return Err(Error::invalid("an_power", "[0, inf)", self.an_power));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::invalid("noise_power", "(0, inf)", self.noise_power));
        }
        if !(self.efficiency > 0.0 && self.efficiency < 1.0) {
            return Err(Error::invalid("efficiency", "(0,1)", self.efficiency));
        }
        if self.relay_count < 1 {
            return Err(Error::invalid("relay_count", "[1, inf)", self.relay_count));
        }
        Ok(())
    }
}

/// Node positions in meters on a 2-D plane.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGeometry {
    pub source: (f64, f64),
    pub dest: (f64, f64),
    pub eve: (f64, f64),
    pub relays: Vec<(f64, f64)>,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

impl NetworkGeometry {
    /// Default layout: source at (0,0), destination at (10,0), relays evenly
    /// spaced on the vertical segment from (5,-1) to (5,1) (a single relay
    /// sits at (5,0)), eavesdropper at (4,1.5) near the relay cluster.
    pub fn default_layout(relay_count: usize) -> Self {
        let relays = if relay_count == 1 {
            vec![(5.0, 0.0)]
        } else {
            (0..relay_count)
                .map(|i| (5.0, -1.0 + 2.0 * i as f64 / (relay_count - 1) as f64))
                .collect()
        };
        NetworkGeometry {
            source: (0.0, 0.0),
            dest: (10.0, 0.0),
            eve: (4.0, 1.5),
            relays,
        }
    }

    pub fn relay_count(&self) -> usize {
        self.relays.len()
    }

    /// Every distance used for a channel draw must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        let named_pair = |a: &str, b: String| Error::ZeroDistance {
            a: a.to_string(),
            b,
        };
        for (i, &r) in self.relays.iter().enumerate() {
            if dist(self.source, r) == 0.0 {
                return Err(named_pair("source", format!("relay {i}")));
            }
            if dist(self.dest, r) == 0.0 {
                return Err(named_pair("dest", format!("relay {i}")));
            }
            if dist(self.eve, r) == 0.0 {
                return Err(named_pair("eve", format!("relay {i}")));
            }
        }
        if dist(self.source, self.eve) == 0.0 {
            return Err(named_pair("source", "eve".to_string()));
        }
        if dist(self.dest, self.eve) == 0.0 {
            return Err(named_pair("dest", "eve".to_string()));
        }
        Ok(())
    }
}

/// Complex channel coefficients for one network realization.
///
/// `dest_relay` (the first-hop artificial-noise channel D -> r_i) and
/// `relay_dest` (the second-hop forwarding channel r_i -> D) are drawn
/// independently; no reciprocity is assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// h_si, source to relay i.
    pub source_relay: Vec<Complex64>,
    /// h_di, destination (AN) to relay i.
    pub dest_relay: Vec<Complex64>,
    /// h_id, relay i to destination.
    pub relay_dest: Vec<Complex64>,
    /// h_ie, relay i to eavesdropper.
    pub relay_eve: Vec<Complex64>,
    /// h_se, source to eavesdropper.
    pub source_eve: Complex64,
    /// h_de, destination (AN) to eavesdropper.
    pub dest_eve: Complex64,
}

impl ChannelSet {
    pub fn relay_count(&self) -> usize {
        self.source_relay.len()
    }
}

/// One candidate operating point: beamformers, power splits and the slack
/// that turns the per-relay power budget into an equality constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Scalar beamformer w_i per relay.
    pub beamformer: Vec<Complex64>,
    /// Power-split ratio rho_i in [0,1] per relay.
    pub power_split: Vec<f64>,
    /// Slack psi_i >= 0 per relay.
    pub slack: Vec<f64>,
}

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Solution {
            beamformer: vec![Complex64::new(0.0, 0.0); n],
            power_split: vec![0.0; n],
            slack: vec![0.0; n],
        }
    }

    pub fn relay_count(&self) -> usize {
        self.beamformer.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (what, len) in [
            ("beamformer", self.beamformer.len()),
            ("power_split", self.power_split.len()),
            ("slack", self.slack.len()),
        ] {
            if len != n {
                return Err(Error::LengthMismatch {
                    what: what.to_string(),
                    got: len,
                    expected: n,
                });
            }
        }
        for (i, &r) in self.power_split.iter().enumerate() {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::invalid(format!("power_split[{i}]"), "[0,1]", r));
            }
        }
        for (i, &p) in self.slack.iter().enumerate() {
            if !(p >= 0.0) {
                return Err(Error::invalid(format!("slack[{i}]"), "[0, inf)", p));
            }
        }
        Ok(())
    }
}

/// The matrices behind the quadratic-form rate expressions.
///
/// `g1/g2/g3` are rank-1 Hermitian PSD matrices built as scaled outer
/// products (P_s g g^H or P_d g g^H), `q1/q2` are the diagonals of the
/// noise-weighting matrices and `b` holds the diagonal of B_rho with entries
/// sqrt(1 - rho_i).
#[derive(Debug, Clone)]
pub struct QuadraticForms {
    /// P_s g1 g1^H with g1_i = h_id h_si (signal as seen by D).
    pub g1: Vec<Vec<Complex64>>,
    /// P_s g2 g2^H with g2_i = h_ie h_si (signal leaked to E).
    pub g2: Vec<Vec<Complex64>>,
    /// P_d g3 g3^H with g3_i = h_ie h_di (forwarded AN hitting E).
    pub g3: Vec<Vec<Complex64>>,
    /// diag entries |h_id|^2 sigma^2.
    pub q1: Vec<f64>,
    /// diag entries |h_ie|^2 sigma^2.
    pub q2: Vec<f64>,
    /// diag entries sqrt(1 - rho_i).
    pub b: Vec<f64>,
}

impl QuadraticForms {
    fn empty(n: usize) -> Self {
        QuadraticForms {
            g1: vec![vec![Complex64::new(0.0, 0.0); n]; n],
            g2: vec![vec![Complex64::new(0.0, 0.0); n]; n],
            g3: vec![vec![Complex64::new(0.0, 0.0); n]; n],
            q1: vec![0.0; n],
            q2: vec![0.0; n],
            b: vec![0.0; n],
        }
    }

    /// Rebuild in place for new power splits (reuses the allocations, which
    /// matters inside the line-search loop).
    pub fn update(&mut self, params: &SystemParams, channels: &ChannelSet, rho: &[f64]) {
        let n = channels.relay_count();
        debug_assert_eq!(rho.len(), n);
        let s2 = params.noise_power;
        for i in 0..n {
            self.q1[i] = channels.relay_dest[i].norm_sqr() * s2;
            self.q2[i] = channels.relay_eve[i].norm_sqr() * s2;
            self.b[i] = (1.0 - rho[i]).max(0.0).sqrt();
        }
        let g1v: Vec<Complex64> = (0..n)
            .map(|i| channels.relay_dest[i] * channels.source_relay[i])
            .collect();
        let g2v: Vec<Complex64> = (0..n)
            .map(|i| channels.relay_eve[i] * channels.source_relay[i])
            .collect();
        let g3v: Vec<Complex64> = (0..n)
            .map(|i| channels.relay_eve[i] * channels.dest_relay[i])
            .collect();
        for i in 0..n {
            for j in 0..n {
                self.g1[i][j] = params.source_power * g1v[i] * g1v[j].conj();
                self.g2[i][j] = params.source_power * g2v[i] * g2v[j].conj();
                self.g3[i][j] = params.an_power * g3v[i] * g3v[j].conj();
            }
        }
    }
}

/// x^H M x for Hermitian M; the imaginary part cancels, the real part is
/// returned.
pub fn hermitian_quad_form(m: &[Vec<Complex64>], x: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, row) in m.iter().enumerate() {
        for (j, &mij) in row.iter().enumerate() {
            acc += x[i].conj() * mij * x[j];
        }
    }
    acc.re
}

/// x^H diag(d) x for a real diagonal.
pub fn diag_quad_form(d: &[f64], x: &[Complex64]) -> f64 {
    d.iter().zip(x).map(|(&di, xi)| di * xi.norm_sqr()).sum()
}

/// Draw one channel realization over the d^-2 Rayleigh model.
///
/// Each coefficient is zero-mean circularly-symmetric complex Gaussian with
/// variance d^-2, so |h|^2 is exponential with mean d^-2. The draw order is
/// fixed (source->relays, dest->relays, relays->dest, relays->eve,
/// source->eve, dest->eve), so a seed fully determines the result.
pub fn draw_channels(geometry: &NetworkGeometry, rng_seed: u64) -> Result<ChannelSet> {
    geometry.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut draw = |d: f64| -> Complex64 {
        let sd = 1.0 / (d * 2f64.sqrt());
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * sd, im * sd)
    };
    let source_relay = geometry
        .relays
        .iter()
        .map(|&r| draw(dist(geometry.source, r)))
        .collect();
    let dest_relay: Vec<_> = geometry
        .relays
        .iter()
        .map(|&r| draw(dist(geometry.dest, r)))
        .collect();
    let relay_dest = geometry
        .relays
        .iter()
        .map(|&r| draw(dist(geometry.dest, r)))
        .collect();
    let relay_eve = geometry
        .relays
        .iter()
        .map(|&r| draw(dist(geometry.eve, r)))
        .collect();
    let source_eve = draw(dist(geometry.source, geometry.eve));
    let dest_eve = draw(dist(geometry.dest, geometry.eve));
    Ok(ChannelSet {
        source_relay,
        dest_relay,
        relay_dest,
        relay_eve,
        source_eve,
        dest_eve,
    })
}

/// Energy harvested by relay i: eta rho_i (P_s|h_si|^2 + P_d|h_di|^2 + sigma^2).
pub fn harvested_power(
    params: &SystemParams,
    channels: &ChannelSet,
    relay_index: usize,
    rho_i: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho_i) {
        return Err(Error::invalid("rho_i", "[0,1]", rho_i));
    }
    Ok(harvested_power_unchecked(params, channels, relay_index, rho_i))
}

pub(crate) fn harvested_power_unchecked(
    params: &SystemParams,
    channels: &ChannelSet,
    i: usize,
    rho_i: f64,
) -> f64 {
    let received = params.source_power * channels.source_relay[i].norm_sqr()
        + params.an_power * channels.dest_relay[i].norm_sqr()
        + params.noise_power;
    params.efficiency * rho_i * received
}

/// Eavesdropper SINR during the first hop: P_s|h_se|^2 / (P_d|h_de|^2 + sigma^2).
pub fn first_hop_eve_sinr(params: &SystemParams, channels: &ChannelSet) -> f64 {
    params.source_power * channels.source_eve.norm_sqr()
        / (params.an_power * channels.dest_eve.norm_sqr() + params.noise_power)
}

/// Build the rate matrices for the given power splits.
pub fn assemble_quadratic_forms(
    params: &SystemParams,
    channels: &ChannelSet,
    rho: &[f64],
) -> QuadraticForms {
    let mut qf = QuadraticForms::empty(channels.relay_count());
    qf.update(params, channels, rho);
    qf
}

/// Destination rate from pre-assembled forms:
/// log2(1 + w^H B G1 B w / (w^H B Q1 B w + w^H Q1 w + sigma^2)).
pub fn rate_destination_from(qf: &QuadraticForms, noise_power: f64, w: &[Complex64]) -> f64 {
    let v: Vec<Complex64> = w.iter().zip(&qf.b).map(|(wi, &bi)| wi * bi).collect();
    let num = hermitian_quad_form(&qf.g1, &v).max(0.0);
    let den = diag_quad_form(&qf.q1, &v) + diag_quad_form(&qf.q1, w) + noise_power;
    (1.0 + num / den).log2()
}

/// Eavesdropper rate from pre-assembled forms; the two hops combine by MRC,
/// so the per-hop SINRs add inside the log.
pub fn rate_eavesdropper_from(
    qf: &QuadraticForms,
    first_hop_sinr: f64,
    noise_power: f64,
    w: &[Complex64],
) -> f64 {
    let v: Vec<Complex64> = w.iter().zip(&qf.b).map(|(wi, &bi)| wi * bi).collect();
    let num = hermitian_quad_form(&qf.g2, &v).max(0.0);
    let den = hermitian_quad_form(&qf.g3, &v).max(0.0)
        + diag_quad_form(&qf.q2, &v)
        + diag_quad_form(&qf.q2, w)
        + noise_power;
    (1.0 + first_hop_sinr + num / den).log2()
}

/// Achievable rate at the destination, in bits/s/Hz.
pub fn rate_destination(
    params: &SystemParams,
    channels: &ChannelSet,
    w: &[Complex64],
    rho: &[f64],
) -> f64 {
    let qf = assemble_quadratic_forms(params, channels, rho);
    rate_destination_from(&qf, params.noise_power, w)
}

/// Achievable rate at the eavesdropper, in bits/s/Hz.
pub fn rate_eavesdropper(
    params: &SystemParams,
    channels: &ChannelSet,
    w: &[Complex64],
    rho: &[f64],
) -> f64 {
    let qf = assemble_quadratic_forms(params, channels, rho);
    rate_eavesdropper_from(&qf, first_hop_eve_sinr(params, channels), params.noise_power, w)
}

/// Secrecy rate: half the positive part of R_d - R_e (two-slot transmission).
pub fn secrecy_rate(
    params: &SystemParams,
    channels: &ChannelSet,
    w: &[Complex64],
    rho: &[f64],
) -> f64 {
    let diff = rate_destination(params, channels, w, rho)
        - rate_eavesdropper(params, channels, w, rho);
    0.5 * diff.max(0.0)
}

/// Transmit power spent by relay i when forwarding:
/// |w_i|^2 [(1-rho_i)P_s|h_si|^2 + (1-rho_i)P_d|h_di|^2 + (2-rho_i)sigma^2].
pub fn relay_tx_power(
    params: &SystemParams,
    channels: &ChannelSet,
    relay_index: usize,
    w_i: Complex64,
    rho_i: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho_i) {
        return Err(Error::invalid("rho_i", "[0,1]", rho_i));
    }
    Ok(w_i.norm_sqr() * forwarded_power_coeff(params, channels, relay_index, rho_i))
}

/// The bracketed coefficient of |w_i|^2 in the relay transmit power: the IP
/// branch power (1-rho_i)(P_s|h_si|^2 + P_d|h_di|^2 + sigma^2) plus the
/// conversion noise sigma^2.
pub(crate) fn forwarded_power_coeff(
    params: &SystemParams,
    channels: &ChannelSet,
    i: usize,
    rho_i: f64,
) -> f64 {
    let s2 = params.noise_power;
    (1.0 - rho_i) * params.source_power * channels.source_relay[i].norm_sqr()
        + (1.0 - rho_i) * params.an_power * channels.dest_relay[i].norm_sqr()
        + (2.0 - rho_i) * s2
}

pub(crate) fn residual_entry(
    params: &SystemParams,
    channels: &ChannelSet,
    i: usize,
    w_i: Complex64,
    rho_i: f64,
    psi_i: f64,
) -> f64 {
    w_i.norm_sqr() * forwarded_power_coeff(params, channels, i, rho_i) + psi_i
        - harvested_power_unchecked(params, channels, i, rho_i)
}

/// Per-relay residual of the power-budget equality: tx_i + psi_i - harvested_i.
/// A feasible point yields the zero vector.
pub fn constraint_residuals(
    params: &SystemParams,
    channels: &ChannelSet,
    sol: &Solution,
) -> Vec<f64> {
    (0..channels.relay_count())
        .map(|i| {
            residual_entry(
                params,
                channels,
                i,
                sol.beamformer[i],
                sol.power_split[i],
                sol.slack[i],
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(ps: f64, pd: f64, s2: f64) -> SystemParams {
        SystemParams {
            source_power: ps,
            an_power: pd,
            noise_power: s2,
            efficiency: 0.5,
            relay_count: 1,
        }
    }

    fn single_relay_channels(
        h_s: Complex64,
        h_d: Complex64,
        h_rd: Complex64,
        h_re: Complex64,
        h_se: Complex64,
        h_de: Complex64,
    ) -> ChannelSet {
        ChannelSet {
            source_relay: vec![h_s],
            dest_relay: vec![h_d],
            relay_dest: vec![h_rd],
            relay_eve: vec![h_re],
            source_eve: h_se,
            dest_eve: h_de,
        }
    }

    fn random_channels(n: usize, seed: u64) -> ChannelSet {
        draw_channels(&NetworkGeometry::default_layout(n), seed).unwrap()
    }

    #[test]
    fn dbm_round_trip() {
        assert!((dbm_to_watts(-40.0) - 1e-7).abs() < 1e-19);
        assert!((dbm_to_watts(40.0) - 10.0).abs() < 1e-12);
        assert!((watts_to_dbm(dbm_to_watts(17.3)) - 17.3).abs() < 1e-10);
    }

    #[test]
    fn params_validation_names_field() {
        let mut p = params(1.0, 1.0, 1e-7);
        p.efficiency = 1.5;
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("efficiency") && err.contains("(0,1)"), "{err}");
    }

    #[test]
    fn same_seed_same_channels() {
        let geo = NetworkGeometry::default_layout(4);
        let a = draw_channels(&geo, 7).unwrap();
        let b = draw_channels(&geo, 7).unwrap();
        assert_eq!(a, b);
        let c = draw_channels(&geo, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_distance_rejected() {
        let mut geo = NetworkGeometry::default_layout(2);
        geo.eve = geo.relays[1];
        assert!(matches!(
            draw_channels(&geo, 0),
            Err(Error::ZeroDistance { .. })
        ));
    }

    /// |h|^2 over unit-distance links is exponential with unit mean; the
    /// relay-eve link of this triangle layout has d = sqrt(3), so its mean
    /// power must be 1/3 (the d^-2 law).
    #[test]
    fn channel_power_follows_path_loss() {
        let geo = NetworkGeometry {
            source: (0.0, 0.0),
            dest: (1.0, 0.0),
            eve: (0.5, -(3f64.sqrt()) / 2.0),
            relays: vec![(0.5, 3f64.sqrt() / 2.0)],
        };
        let draws = 100_000;
        let mut sums = [0.0f64; 6];
        for seed in 0..draws {
            let ch = draw_channels(&geo, seed).unwrap();
            sums[0] += ch.source_relay[0].norm_sqr();
            sums[1] += ch.dest_relay[0].norm_sqr();
            sums[2] += ch.relay_dest[0].norm_sqr();
            sums[3] += ch.source_eve.norm_sqr();
            sums[4] += ch.dest_eve.norm_sqr();
            sums[5] += ch.relay_eve[0].norm_sqr();
        }
        // Exponential(mean m) has std = m, so a mean over k draws has
        // standard error m/sqrt(k).
        let se = 1.0 / (draws as f64).sqrt();
        for mean in sums[..5].iter().map(|s| s / draws as f64) {
            assert!((mean - 1.0).abs() < 3.0 * se, "unit link mean {mean}");
        }
        let eve_mean = sums[5] / draws as f64;
        assert!(
            (eve_mean - 1.0 / 3.0).abs() < 3.0 * se / 3.0,
            "sqrt(3) link mean {eve_mean}"
        );
        // doubling every distance scales the mean power by 1/4
        let doubled = NetworkGeometry {
            source: (0.0, 0.0),
            dest: (2.0, 0.0),
            eve: (1.0, -(3f64.sqrt())),
            relays: vec![(1.0, 3f64.sqrt())],
        };
        let mut sum = 0.0f64;
        for seed in 0..draws {
            sum += draw_channels(&doubled, seed).unwrap().source_relay[0].norm_sqr();
        }
        let mean = sum / draws as f64;
        assert!((mean - 0.25).abs() < 3.0 * se / 4.0, "doubled link mean {mean}");
    }

    #[test]
    fn harvested_power_examples() {
        let ch = single_relay_channels(
            c(2f64.sqrt(), 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        );
        // zero split harvests nothing
        let p = params(1.0, 1.0, 1e-9);
        assert_eq!(harvested_power(&p, &ch, 0, 0.0).unwrap(), 0.0);
        // eta=0.5, rho=1, P_s|h_si|^2 = 1, P_d|h_di|^2 = 1, sigma^2 = 0 -> 1 W
        let ch2 = single_relay_channels(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        );
        let p2 = params(1.0, 1.0, 0.0);
        assert!((harvested_power(&p2, &ch2, 0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // eta=0.5, rho=0.1, P_s|h_si|^2 = 2, P_d|h_di|^2 = 1 -> 0.15 W
        let p3 = params(1.0, 1.0, 0.0);
        assert!((harvested_power(&p3, &ch, 0, 0.1).unwrap() - 0.15).abs() < 1e-15);
        assert!(harvested_power(&p3, &ch, 0, 1.2).is_err());
        assert!(harvested_power(&p3, &ch, 0, -0.2).is_err());
    }

    #[test]
    fn first_hop_sinr_examples() {
        let ch = single_relay_channels(
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
        );
        assert_eq!(first_hop_eve_sinr(&params(0.0, 1.0, 1.0), &ch), 0.0);
        assert!((first_hop_eve_sinr(&params(1.0, 1.0, 1.0), &ch) - 0.5).abs() < 1e-15);
        // strictly decreasing in the AN power
        let mut last = f64::INFINITY;
        for pd in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let v = first_hop_eve_sinr(&params(1.0, pd, 1.0), &ch);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn quadratic_forms_structure() {
        let n = 3;
        let ch = random_channels(n, 11);
        let p = SystemParams {
            relay_count: n,
            ..params(2.0, 3.0, 1e-7)
        };
        let qf = assemble_quadratic_forms(&p, &ch, &[0.0; 3]);
        // rho = 0 -> B is the identity
        assert!(qf.b.iter().all(|&b| b == 1.0));
        // Hermitian, PSD diagonal, rank <= 1 via vanishing 2x2 minors
        for i in 0..n {
            assert!(qf.g1[i][i].im.abs() < 1e-18 && qf.g1[i][i].re >= 0.0);
            for j in 0..n {
                let diff = qf.g1[i][j] - qf.g1[j][i].conj();
                assert!(diff.norm() < 1e-18);
                for k in 0..n {
                    for l in 0..n {
                        let minor = qf.g1[i][j] * qf.g1[k][l] - qf.g1[i][l] * qf.g1[k][j];
                        assert!(minor.norm() < 1e-20, "rank > 1 minor {minor}");
                    }
                }
            }
        }
        for i in 0..n {
            let s2 = p.noise_power;
            assert!((qf.q1[i] - ch.relay_dest[i].norm_sqr() * s2).abs() < 1e-24);
            assert!((qf.q2[i] - ch.relay_eve[i].norm_sqr() * s2).abs() < 1e-24);
        }
    }

    #[test]
    fn quad_form_matches_scalar_outer_product() {
        let n = 2;
        let ch = random_channels(n, 5);
        let p = SystemParams {
            relay_count: n,
            ..params(1.7, 0.0, 1e-7)
        };
        let qf = assemble_quadratic_forms(&p, &ch, &[0.0; 2]);
        let w = vec![c(0.3, -1.1), c(-0.4, 0.2)];
        let matrix_form = hermitian_quad_form(&qf.g1, &w);
        // P_s |sum_i w_i^* h_id h_si|^2 recomputed scalar-wise
        let sum: Complex64 = (0..n)
            .map(|i| w[i].conj() * ch.relay_dest[i] * ch.source_relay[i])
            .sum();
        let scalar_form = p.source_power * sum.norm_sqr();
        let rel = (matrix_form - scalar_form).abs() / scalar_form.abs();
        assert!(rel <= 1e-12, "rel err {rel}");
    }

    #[test]
    fn rate_destination_edge_cases() {
        let n = 2;
        let ch = random_channels(n, 3);
        let p = SystemParams {
            relay_count: n,
            ..params(1.0, 1.0, 1e-7)
        };
        let zeros = vec![c(0.0, 0.0); n];
        assert_eq!(rate_destination(&p, &ch, &zeros, &[0.3, 0.4]), 0.0);
        // rho = 1 silences the information branch entirely
        let w = vec![c(1.0, 0.5), c(-0.2, 0.1)];
        assert_eq!(rate_destination(&p, &ch, &w, &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn rate_eavesdropper_edge_cases() {
        let n = 2;
        let ch = random_channels(n, 4);
        let p = SystemParams {
            relay_count: n,
            ..params(1.0, 1.0, 1e-7)
        };
        let zeros = vec![c(0.0, 0.0); n];
        let p0 = SystemParams {
            source_power: 0.0,
            ..p
        };
        assert_eq!(rate_eavesdropper(&p0, &ch, &zeros, &[0.1, 0.1]), 0.0);
        let expect = (1.0 + first_hop_eve_sinr(&p, &ch)).log2();
        let got = rate_eavesdropper(&p, &ch, &zeros, &[0.1, 0.1]);
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn secrecy_rate_clamps_and_composes() {
        let n = 2;
        let p = SystemParams {
            relay_count: n,
            ..params(1.0, 1.0, 1e-7)
        };
        // no eavesdropper path -> secrecy is half the destination rate
        let mut ch = random_channels(n, 9);
        ch.source_eve = c(0.0, 0.0);
        ch.relay_eve = vec![c(0.0, 0.0); n];
        let w = vec![c(0.4, 0.1), c(0.2, -0.3)];
        let rho = [0.2, 0.5];
        let sr = secrecy_rate(&p, &ch, &w, &rho);
        assert!((sr - 0.5 * rate_destination(&p, &ch, &w, &rho)).abs() < 1e-15);
        // an instance where the eavesdropper wins clamps to zero
        let mut bad = random_channels(n, 10);
        bad.source_eve = c(100.0, 0.0);
        assert!(
            rate_destination(&p, &bad, &w, &rho) < rate_eavesdropper(&p, &bad, &w, &rho)
        );
        assert_eq!(secrecy_rate(&p, &bad, &w, &rho), 0.0);
        // otherwise it is exactly the half difference
        let ch2 = random_channels(n, 12);
        let d = rate_destination(&p, &ch2, &w, &rho) - rate_eavesdropper(&p, &ch2, &w, &rho);
        if d > 0.0 {
            assert!((secrecy_rate(&p, &ch2, &w, &rho) - 0.5 * d).abs() < 1e-15);
        }
    }

    #[test]
    fn relay_tx_power_examples() {
        let ch = single_relay_channels(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        );
        let p = params(1.0, 1.0, 0.0);
        assert_eq!(relay_tx_power(&p, &ch, 0, c(0.0, 0.0), 0.4).unwrap(), 0.0);
        // rho = 1 leaves only the conversion-noise term
        let p2 = params(1.0, 1.0, 0.25);
        let got = relay_tx_power(&p2, &ch, 0, c(0.0, 3.0), 1.0).unwrap();
        assert!((got - 9.0 * 0.25).abs() < 1e-15);
        // |w|^2 = 4, rho = 0.5, unit link powers, sigma^2 = 0 -> 4 W
        let got = relay_tx_power(&p, &ch, 0, c(2.0, 0.0), 0.5).unwrap();
        assert!((got - 4.0).abs() < 1e-15);
        assert!(relay_tx_power(&p, &ch, 0, c(1.0, 0.0), 1.5).is_err());
    }

    #[test]
    fn residuals_vanish_at_constructed_feasible_point() {
        // powers of two keep every term exact in binary floating point
        let ch = single_relay_channels(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        );
        let p = SystemParams {
            source_power: 1.0,
            an_power: 1.0,
            noise_power: 0.0,
            efficiency: 0.5,
            relay_count: 1,
        };
        let rho = 0.5;
        let w = c(0.5, 0.0);
        let tx = relay_tx_power(&p, &ch, 0, w, rho).unwrap();
        let eh = harvested_power(&p, &ch, 0, rho).unwrap();
        let sol = Solution {
            beamformer: vec![w],
            power_split: vec![rho],
            slack: vec![eh - tx],
        };
        assert!(sol.slack[0] >= 0.0);
        assert_eq!(constraint_residuals(&p, &ch, &sol), vec![0.0]);
        // w = 0, psi = 0, rho = 0 is feasible as well
        let z = Solution::zeros(1);
        assert_eq!(constraint_residuals(&p, &ch, &z), vec![0.0]);
    }

    #[test]
    fn residuals_match_independent_recomputation() {
        let n = 4;
        let ch = random_channels(n, 21);
        let p = SystemParams {
            relay_count: n,
            ..params(3.0, 2.0, 1e-4)
        };
        let sol = Solution {
            beamformer: (0..n).map(|i| c(0.1 * i as f64 + 0.2, -0.3)).collect(),
            power_split: vec![0.1, 0.4, 0.7, 0.95],
            slack: vec![0.0, 0.01, 0.2, 1.0],
        };
        let res = constraint_residuals(&p, &ch, &sol);
        for i in 0..n {
            let tx = sol.beamformer[i].norm_sqr()
                * ((1.0 - sol.power_split[i])
                    * (p.source_power * ch.source_relay[i].norm_sqr()
                        + p.an_power * ch.dest_relay[i].norm_sqr())
                    + (2.0 - sol.power_split[i]) * p.noise_power);
            let eh = p.efficiency
                * sol.power_split[i]
                * (p.source_power * ch.source_relay[i].norm_sqr()
                    + p.an_power * ch.dest_relay[i].norm_sqr()
                    + p.noise_power);
            assert!((res[i] - (tx + sol.slack[i] - eh)).abs() <= 1e-12);
        }
    }

    #[test]
    fn harvested_power_linear_in_split_and_tx_power_nonincreasing() {
        let n = 2;
        let ch = random_channels(n, 44);
        let p = SystemParams {
            relay_count: n,
            ..params(3.0, 2.0, 1e-5)
        };
        let full = harvested_power(&p, &ch, 0, 1.0).unwrap();
        for k in 0..=10 {
            let rho = k as f64 / 10.0;
            let got = harvested_power(&p, &ch, 0, rho).unwrap();
            assert!(got >= 0.0);
            assert!((got - rho * full).abs() <= 1e-15 * full);
        }
        let w = c(0.8, -0.4);
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let rho = k as f64 / 10.0;
            let tx = relay_tx_power(&p, &ch, 1, w, rho).unwrap();
            assert!(tx <= last);
            last = tx;
        }
    }

    #[test]
    fn rate_is_phase_invariant() {
        let n = 3;
        let ch = random_channels(n, 33);
        let p = SystemParams {
            relay_count: n,
            ..params(2.0, 1.0, 1e-7)
        };
        let w: Vec<Complex64> = vec![c(0.5, 0.1), c(-0.2, 0.4), c(0.1, -0.6)];
        let rho = [0.1, 0.5, 0.8];
        let base = rate_destination(&p, &ch, &w, &rho);
        for phi in [0.3, 1.1, 2.9] {
            let rot = Complex64::from_polar(1.0, phi);
            let wr: Vec<Complex64> = w.iter().map(|wi| wi * rot).collect();
            assert!((rate_destination(&p, &ch, &wr, &rho) - base).abs() < 1e-12);
        }
    }
}
