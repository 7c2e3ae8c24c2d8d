use thiserror::Error;

use crate::model::{DeviceId, ValidationErrors};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rate level {0} out of range, valid levels are 1..=15")]
    LevelOutOfRange(i64),

    #[error("no links to split the file over")]
    NoLinks,

    #[error("link rate must be positive, got {0} kbps")]
    NonPositiveRate(f64),

    #[error("duplicate link {device}/{interface}")]
    DuplicateLink { device: DeviceId, interface: u8 },

    #[error("device {device} shares no data interface with sink {sink}")]
    NoCommonInterface { device: DeviceId, sink: DeviceId },

    #[error("no link from {device} over interface {interface}")]
    UnknownLink { device: DeviceId, interface: u8 },

    #[error("baseline latency must be positive, got {0} s")]
    NonPositiveBaseline(f64),

    #[error("duration must be non-negative, got {0} s")]
    NegativeDuration(f64),

    #[error("at least one active interface required")]
    NoActiveInterface,

    #[error(
        "{sources} sources x {interfaces} interfaces exceeds the enumeration limit \
         (12 x 6); use greedy_select"
    )]
    EnumerationGuard { sources: usize, interfaces: usize },

    #[error("no feasible source assignment: {0}")]
    Infeasible(String),

    #[error("at least one Monte Carlo draw required")]
    NoDraws,

    #[error("invalid scenario:\n{0}")]
    Validation(#[from] ValidationErrors),
}
