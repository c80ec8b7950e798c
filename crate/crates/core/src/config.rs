//! Key/value configuration with override merging.
//!
//! The config file is flat text, one `section.key = value` pair per line,
//! `#` starting a comment. Defaults are applied first, then file pairs in
//! order, then command-line overrides, so later sources win. Unknown keys
//! are rejected by name; range violations name the field and its constraint.
//!
//! Keys (defaults in parentheses):
//!
//! ```text
//! params.source_dbm (40)       source power P_s in dBm
//! params.an_dbm (40)           artificial-noise power P_d in dBm
//! params.noise_dbm (-40)       noise power sigma^2 in dBm
//! params.efficiency (0.5)      energy conversion efficiency, in (0,1)
//! params.relays (5)            relay count
//! geometry.source (0,0)        source position "x,y" in meters
//! geometry.dest (10,0)         destination position
//! geometry.eve (4,1.5)         eavesdropper position
//! geometry.relays (auto)       explicit relay positions "x,y; x,y; ..."
//! penalty.lambda0 (35)         initial penalty parameter
//! penalty.growth (1.2)         penalty growth factor, >= 1
//! penalty.tolerance (1e-6)     stopping tolerance
//! penalty.max_outer_iters (20000)
//! penalty.armijo_init (1)      first trial step, in (0,1]
//! penalty.armijo_shrink (0.5)  backtracking factor, in (0,1)
//! penalty.armijo_slope (1e-4)  sufficient-increase fraction, in (0,1)
//! penalty.max_backtracks (40)
//! saf.grid_step (0.01)         rho grid spacing, in (0, 0.5]
//! saf.search_mode (full-grid)  full-grid | cyclic-coordinate
//! saf.max_cycles (10)
//! sweep.scenario (snr-sweep)   snr-sweep | an-sweep | relay-sweep | convergence
//! sweep.values (per scenario)  comma-separated sweep points
//! sweep.realizations (100)     channel realizations per point (1 for convergence)
//! sweep.seed (1)               base RNG seed; realization j uses seed + j
//! sweep.methods (pa,saf)       subset of {pa, saf}
//! ```

use crate::baseline::SearchMode;
use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, GeometrySpec, Method, Scenario};
use crate::model::{dbm_to_watts, watts_to_dbm, NetworkGeometry};

/// Parse config file text into ordered key/value pairs, validating only the
/// line syntax.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::MalformedLine {
                line: idx + 1,
                content: raw.trim().to_string(),
            });
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_scenario(value: &str) -> Result<Scenario> {
    match value {
        "snr-sweep" => Ok(Scenario::SnrSweep),
        "an-sweep" => Ok(Scenario::AnSweep),
        "relay-sweep" => Ok(Scenario::RelaySweep),
        "convergence" => Ok(Scenario::Convergence),
        other => Err(Error::invalid(
            "sweep.scenario",
            "snr-sweep | an-sweep | relay-sweep | convergence",
            other,
        )),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::invalid(key, "a number", value))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::invalid(key, "a nonnegative integer", value))
}

fn parse_point(key: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::invalid(key, "a coordinate pair \"x,y\"", value));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

fn parse_value_list(key: &str, value: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::invalid(key, "a nonempty comma-separated list", value));
    }
    items.iter().map(|s| parse_f64(key, s)).collect()
}

fn parse_methods(value: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m = match item.to_ascii_lowercase().as_str() {
            "pa" => Method::Pa,
            "saf" => Method::Saf,
            other => return Err(Error::invalid("sweep.methods", "pa | saf", other)),
        };
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::invalid("sweep.methods", "a nonempty subset of {pa, saf}", value));
    }
    Ok(methods)
}

/// Track geometry keys separately: explicit relay positions change the
/// GeometrySpec variant, and the fixed nodes must survive that switch
/// regardless of key order.
#[derive(Debug, Clone)]
struct GeometryDraft {
    source: (f64, f64),
    dest: (f64, f64),
    eve: (f64, f64),
    relays: Option<Vec<(f64, f64)>>,
}

impl GeometryDraft {
    fn new() -> Self {
        let g = NetworkGeometry::default_layout(1);
        GeometryDraft {
            source: g.source,
            dest: g.dest,
            eve: g.eve,
            relays: None,
        }
    }

    fn into_spec(self) -> GeometrySpec {
        match self.relays {
            Some(relays) => GeometrySpec::Explicit(NetworkGeometry {
                source: self.source,
                dest: self.dest,
                eve: self.eve,
                relays,
            }),
            None => GeometrySpec::Auto {
                source: self.source,
                dest: self.dest,
                eve: self.eve,
            },
        }
    }
}

/// Merge defaults, file pairs and override pairs (in that order) into a
/// validated [`ExperimentConfig`].
pub fn resolve_config(
    file_text: Option<&str>,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig> {
    let mut pairs = match file_text {
        Some(text) => parse_pairs(text)?,
        None => Vec::new(),
    };
    pairs.extend(overrides.iter().cloned());

    // the scenario decides the default sweep values and realization count,
    // so it must be known before the remaining keys apply
    let mut scenario = Scenario::SnrSweep;
    for (key, value) in &pairs {
        if key == "sweep.scenario" {
            scenario = parse_scenario(value)?;
        }
    }

    let mut cfg = ExperimentConfig::defaults_for(scenario);
    let mut geometry = GeometryDraft::new();

    for (key, value) in &pairs {
        apply_key(&mut cfg, &mut geometry, key, value)?;
    }
    cfg.geometry = geometry.into_spec();
    cfg.validate()?;
    Ok(cfg)
}

fn apply_key(
    cfg: &mut ExperimentConfig,
    geometry: &mut GeometryDraft,
    key: &str,
    value: &str,
) -> Result<()> {
    match key {
        "params.source_dbm" => cfg.params.source_power = dbm_to_watts(parse_f64(key, value)?),
        "params.an_dbm" => cfg.params.an_power = dbm_to_watts(parse_f64(key, value)?),
        "params.noise_dbm" => cfg.params.noise_power = dbm_to_watts(parse_f64(key, value)?),
        "params.efficiency" => cfg.params.efficiency = parse_f64(key, value)?,
        "params.relays" => cfg.params.relay_count = parse_usize(key, value)?,
        "geometry.source" => geometry.source = parse_point(key, value)?,
        "geometry.dest" => geometry.dest = parse_point(key, value)?,
        "geometry.eve" => geometry.eve = parse_point(key, value)?,
        "geometry.relays" => {
            let relays: Vec<(f64, f64)> = value
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_point(key, s))
                .collect::<Result<_>>()?;
            if relays.is_empty() {
                return Err(Error::invalid(key, "a semicolon-separated list of \"x,y\"", value));
            }
            geometry.relays = Some(relays);
        }
        "penalty.lambda0" => cfg.penalty.lambda0 = parse_f64(key, value)?,
        "penalty.growth" => cfg.penalty.lambda_growth = parse_f64(key, value)?,
        "penalty.tolerance" => cfg.penalty.tolerance = parse_f64(key, value)?,
        "penalty.max_outer_iters" => cfg.penalty.max_outer_iters = parse_usize(key, value)?,
        "penalty.armijo_init" => cfg.penalty.armijo_init = parse_f64(key, value)?,
        "penalty.armijo_shrink" => cfg.penalty.armijo_shrink = parse_f64(key, value)?,
        "penalty.armijo_slope" => cfg.penalty.armijo_slope = parse_f64(key, value)?,
        "penalty.max_backtracks" => cfg.penalty.max_backtracks = parse_usize(key, value)?,
        "saf.grid_step" => cfg.saf.grid_step = parse_f64(key, value)?,
        "saf.search_mode" => {
            cfg.saf.search_mode = match value {
                "full-grid" => SearchMode::FullGrid,
                "cyclic-coordinate" => SearchMode::CyclicCoordinate,
                other => {
                    return Err(Error::invalid(key, "full-grid | cyclic-coordinate", other))
                }
            }
        }
        "saf.max_cycles" => cfg.saf.max_cycles = parse_usize(key, value)?,
        "sweep.scenario" => cfg.scenario = parse_scenario(value)?,
        "sweep.values" => cfg.sweep_values = parse_value_list(key, value)?,
        "sweep.realizations" => cfg.realizations = parse_usize(key, value)?,
        "sweep.seed" => {
            cfg.base_seed = value
                .parse()
                .map_err(|_| Error::invalid(key, "a nonnegative integer", value))?
        }
        "sweep.methods" => cfg.methods = parse_methods(value)?,
        _ => return Err(Error::UnknownKey { key: key.to_string() }),
    }
    Ok(())
}

fn fmt_point(p: (f64, f64)) -> String {
    format!("{},{}", p.0, p.1)
}

/// Canonical key/value listing of a resolved config, used to make every
/// emitted file self-describing. Deterministic order and formatting.
pub fn describe(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| out.push((k.to_string(), v));
    push("sweep.scenario", cfg.scenario.as_str().to_string());
    push(
        "sweep.values",
        cfg.sweep_values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    push("sweep.realizations", cfg.realizations.to_string());
    push("sweep.seed", cfg.base_seed.to_string());
    push(
        "sweep.methods",
        cfg.methods
            .iter()
            .map(|m| m.as_str().to_ascii_lowercase())
            .collect::<Vec<_>>()
            .join(","),
    );
    push("params.source_dbm", watts_to_dbm(cfg.params.source_power).to_string());
    push("params.an_dbm", watts_to_dbm(cfg.params.an_power).to_string());
    push("params.noise_dbm", watts_to_dbm(cfg.params.noise_power).to_string());
    push("params.efficiency", cfg.params.efficiency.to_string());
    push("params.relays", cfg.params.relay_count.to_string());
    match &cfg.geometry {
        GeometrySpec::Auto { source, dest, eve } => {
            push("geometry.source", fmt_point(*source));
            push("geometry.dest", fmt_point(*dest));
            push("geometry.eve", fmt_point(*eve));
        }
        GeometrySpec::Explicit(g) => {
            push("geometry.source", fmt_point(g.source));
            push("geometry.dest", fmt_point(g.dest));
            push("geometry.eve", fmt_point(g.eve));
            push(
                "geometry.relays",
                g.relays
                    .iter()
                    .map(|&p| fmt_point(p))
                    .collect::<Vec<_>>()
                    .join("; "),
            );
        }
    }
    push("penalty.lambda0", cfg.penalty.lambda0.to_string());
    push("penalty.growth", cfg.penalty.lambda_growth.to_string());
    push("penalty.tolerance", cfg.penalty.tolerance.to_string());
    push("penalty.max_outer_iters", cfg.penalty.max_outer_iters.to_string());
    push("penalty.armijo_init", cfg.penalty.armijo_init.to_string());
    push("penalty.armijo_shrink", cfg.penalty.armijo_shrink.to_string());
    push("penalty.armijo_slope", cfg.penalty.armijo_slope.to_string());
    push("penalty.max_backtracks", cfg.penalty.max_backtracks.to_string());
    push("saf.grid_step", cfg.saf.grid_step.to_string());
    push(
        "saf.search_mode",
        match cfg.saf.search_mode {
            SearchMode::FullGrid => "full-grid".to_string(),
            SearchMode::CyclicCoordinate => "cyclic-coordinate".to_string(),
        },
    );
    push("saf.max_cycles", cfg.saf.max_cycles.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_input_yields_documented_defaults() {
        let cfg = resolve_config(None, &[]).unwrap();
        assert_eq!(cfg.scenario, Scenario::SnrSweep);
        assert_eq!(cfg.sweep_values, vec![10.0, 20.0, 30.0, 40.0, 50.0]);
        assert_eq!(cfg.realizations, 100);
        assert_eq!(cfg.base_seed, 1);
        assert!((cfg.params.source_power - 10.0).abs() < 1e-12);
        assert!((cfg.params.an_power - 10.0).abs() < 1e-12);
        assert!((cfg.params.noise_power - 1e-7).abs() < 1e-19);
        assert_eq!(cfg.params.efficiency, 0.5);
        assert_eq!(cfg.params.relay_count, 5);
        assert_eq!(cfg.penalty.lambda0, 35.0);
        assert_eq!(cfg.penalty.lambda_growth, 1.2);
        assert_eq!(cfg.saf.grid_step, 0.01);
        assert_eq!(cfg.methods, vec![Method::Pa, Method::Saf]);
    }

    #[test]
    fn flag_overrides_file_value() {
        let file = "penalty.lambda0 = 10\nparams.relays = 2\n";
        let overrides = vec![("penalty.lambda0".to_string(), "99".to_string())];
        let cfg = resolve_config(Some(file), &overrides).unwrap();
        assert_eq!(cfg.penalty.lambda0, 99.0);
        assert_eq!(cfg.params.relay_count, 2);
    }

    #[test]
    fn out_of_range_efficiency_names_field_and_constraint() {
        let err = resolve_config(Some("params.efficiency = 1.5\n"), &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("efficiency"), "{err}");
        assert!(err.contains("(0,1)"), "{err}");
    }

    #[test]
    fn unknown_key_is_listed() {
        let err = resolve_config(Some("params.sourec_dbm = 40\n"), &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("params.sourec_dbm"), "{err}");
    }

    #[test]
    fn malformed_line_is_located() {
        let err = parse_pairs("params.relays = 3\nnot a pair\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let pairs = parse_pairs("# top\n\nparams.relays = 3 # trailing\n").unwrap();
        assert_eq!(pairs, vec![("params.relays".to_string(), "3".to_string())]);
    }

    #[test]
    fn scenario_choice_switches_value_defaults() {
        let cfg = resolve_config(Some("sweep.scenario = relay-sweep\n"), &[]).unwrap();
        assert_eq!(cfg.sweep_values, vec![1.0, 3.0, 5.0]);
        let cfg = resolve_config(Some("sweep.scenario = convergence\n"), &[]).unwrap();
        assert_eq!(cfg.realizations, 1);
    }

    #[test]
    fn explicit_relay_positions_must_match_count() {
        let file = "params.relays = 2\ngeometry.relays = 5,-1; 5,1\n";
        let cfg = resolve_config(Some(file), &[]).unwrap();
        assert!(matches!(cfg.geometry, GeometrySpec::Explicit(_)));
        assert!(cfg.geometry.realize(2).is_ok());
        assert!(cfg.geometry.realize(3).is_err());
    }

    #[test]
    fn powers_convert_at_the_boundary() {
        let cfg = resolve_config(Some("params.source_dbm = 30\n"), &[]).unwrap();
        assert!((cfg.params.source_power - 1.0).abs() < 1e-12);
    }

    #[test]
    fn describe_round_trips_through_resolve() {
        let cfg = resolve_config(
            Some("sweep.scenario = an-sweep\nparams.relays = 3\npenalty.lambda0 = 20\n"),
            &[],
        )
        .unwrap();
        let listing = describe(&cfg);
        let text: String = listing
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let cfg2 = resolve_config(Some(&text), &[]).unwrap();
        assert_eq!(cfg2.scenario, cfg.scenario);
        assert_eq!(cfg2.params, cfg.params);
        assert_eq!(cfg2.sweep_values, cfg.sweep_values);
        assert_eq!(cfg2.penalty.lambda0, cfg.penalty.lambda0);
    }
}
