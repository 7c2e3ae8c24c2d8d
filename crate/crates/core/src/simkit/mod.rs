//! Simulation kit: a packet-level transfer simulator that cross-checks the
//! closed-form latency, a seeded Monte Carlo engine for random splits, rate
//! level sweeps, and the transfer session lifecycle.

mod montecarlo;
mod session;
mod sweep;
mod trace;

pub use montecarlo::{
    run_monte_carlo, Histogram, MonteCarloSummary, HISTOGRAM_BINS, PARTITION_DRAWS,
};
pub use session::{
    advance_session, EventKind, Issuer, LifecycleEvent, Phase, SessionState, TransitionError,
};
pub use sweep::{derive_seed, sweep_rate_levels, SweepResult, SweepRow, VariedLink};
pub use trace::{simulate_packet_transfer, PacketEvent, PacketTrace};
