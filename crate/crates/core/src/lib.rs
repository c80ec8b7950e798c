//! Secrecy-rate maximization for multi-relay wireless-powered
//! amplify-and-forward networks.
//!
//! A source communicates with a destination through energy-harvesting relays
//! while one idle relay eavesdrops. The destination jams the first hop with
//! artificial noise, which doubles as an energy source for the relays. The
//! crate provides:
//!
//! - [`model`]: channel generation, harvested power, destination and
//!   eavesdropper rates, power-budget residuals;
//! - [`optimizer`]: the block-wise penalty function method that jointly
//!   tunes power splits and beamformers;
//! - [`baseline`]: the simple amplify-and-forward benchmark with grid search
//!   over the power splits;
//! - [`experiments`]: a deterministic Monte Carlo harness emitting
//!   plot-ready CSV;
//! - [`selfcheck`]: fast runtime verification of the numerics;
//! - [`config`]: key/value config files and override merging for the CLI.

pub mod baseline;
pub mod config;
pub mod error;
pub mod experiments;
pub mod model;
pub mod optimizer;
pub mod selfcheck;

pub use error::{Error, Result};
