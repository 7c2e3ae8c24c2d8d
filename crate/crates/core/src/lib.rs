//! Multi-source device-to-device (Ds2D) file transfer analysis.
//!
//! A sink device pulls one file from several nearby source devices at once,
//! each over a different radio interface. This crate computes how to split
//! the file's packets across those links, the resulting file transfer
//! latency, and what that means for a source device's energy use,
//! electricity cost, carbon footprint and battery life.
//!
//! - [`model`]: rate table, devices, scenario and validation
//! - [`split`]: optimal, random, single-link and multi-homing splits; latency
//! - [`selection`]: which sources transmit on which sink interfaces
//! - [`green`]: energy, cost, carbon and battery-life analytics
//! - [`simkit`]: packet-level simulation, Monte Carlo, sweeps, session lifecycle
//! - [`cli`]: scenario files, commands and CSV/JSON output
//!
//! See `examples/` for one runnable program per capability.

pub mod cli;
pub mod error;
pub mod green;
pub mod model;
pub mod selection;
pub mod simkit;
pub mod split;

pub use error::{Error, Result};
pub use green::{green_report, BatteryLife, GreenReport};
pub use model::{BatteryProfile, Device, DeviceId, FileSpec, Link, RateTable, Scenario};
pub use selection::{select_sources, AggregateRate, Assignment, Objective, Pair};
pub use split::{ftl, optimal_split, random_split, Scheme, SplitPlan, TransferOutcome};
