//! Lifecycle of one multi-source transfer as seen by the sink.
//!
//! ```text
//! idle -> discovery -> selection -> split_assignment -> transferring
//!      -> aggregating -> complete
//! ```
//!
//! `aborted` is reachable from every non-terminal phase. Whether the
//! cellular network or the devices drive the set-up only changes who issues
//! the events, recorded as [`Issuer`].

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::selection::{Assignment, Pair};
use crate::split::SplitPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Idle,
    Discovery,
    Selection,
    SplitAssignment,
    Transferring,
    Aggregating,
    Complete,
    Aborted,
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Complete | Phase::Aborted)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Idle => "idle",
            Phase::Discovery => "discovery",
            Phase::Selection => "selection",
            Phase::SplitAssignment => "split_assignment",
            Phase::Transferring => "transferring",
            Phase::Aggregating => "aggregating",
            Phase::Complete => "complete",
            Phase::Aborted => "aborted",
        };
        f.write_str(s)
    }
}

/// Who issued an event: the cellular network (centralized set-up) or a
/// device (decentralized set-up).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Issuer {
    #[default]
    Network,
    Device,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    StartDiscovery,
    SourcesDiscovered,
    SourcesSelected(Assignment),
    PlanDistributed(SplitPlan),
    PacketReceived,
    Aggregated,
    Abort,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::StartDiscovery => "start_discovery",
            EventKind::SourcesDiscovered => "sources_discovered",
            EventKind::SourcesSelected(_) => "sources_selected",
            EventKind::PlanDistributed(_) => "plan_distributed",
            EventKind::PacketReceived => "packet_received",
            EventKind::Aggregated => "aggregated",
            EventKind::Abort => "abort",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifecycleEvent {
    pub kind: EventKind,
    pub issuer: Issuer,
}

impl LifecycleEvent {
    pub fn network(kind: EventKind) -> Self {
        Self {
            kind,
            issuer: Issuer::Network,
        }
    }

    pub fn device(kind: EventKind) -> Self {
        Self {
            kind,
            issuer: Issuer::Device,
        }
    }
}

impl From<EventKind> for LifecycleEvent {
    fn from(kind: EventKind) -> Self {
        Self::network(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("illegal event `{event}` in phase `{phase}`: {reason}")]
pub struct TransitionError {
    pub phase: Phase,
    pub event: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    phase: Phase,
    assignment: Option<Assignment>,
    plan: Option<SplitPlan>,
    received_packets: u64,
    coordinator: Option<Issuer>,
}

impl Default for SessionState {
    fn default() -> Self {
        Self {
            phase: Phase::Idle,
            assignment: None,
            plan: None,
            received_packets: 0,
            coordinator: None,
        }
    }
}

impl SessionState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        self.assignment.as_ref()
    }

    pub fn plan(&self) -> Option<&SplitPlan> {
        self.plan.as_ref()
    }

    pub fn received_packets(&self) -> u64 {
        self.received_packets
    }

    /// Issuer of the event that started discovery.
    pub fn coordinator(&self) -> Option<Issuer> {
        self.coordinator
    }

    /// Packets the sink expects, once a plan is known.
    pub fn expected_packets(&self) -> Option<u64> {
        self.plan.as_ref().map(|p| p.file.packet_count)
    }
}

/// Applies `event` to `state`, returning the next state or rejecting the
/// event if it is not legal in the current phase.
pub fn advance_session(
    mut state: SessionState,
    event: impl Into<LifecycleEvent>,
) -> Result<SessionState, TransitionError> {
    let event = event.into();
    let phase = state.phase();
    let reject = |reason: &str| TransitionError {
        phase,
        event: event.kind.name(),
        reason: reason.to_owned(),
    };

    let next = match (&event.kind, phase) {
        (_, p) if p.is_terminal() => return Err(reject("session already ended")),
        (EventKind::Abort, _) => Phase::Aborted,
        (EventKind::StartDiscovery, Phase::Idle) => {
            state.coordinator = Some(event.issuer);
            Phase::Discovery
        }
        (EventKind::SourcesDiscovered, Phase::Discovery) => Phase::Selection,
        (EventKind::SourcesSelected(a), Phase::Selection) => {
            if a.pairs.is_empty() {
                return Err(reject("assignment has no links"));
            }
            state.assignment = Some(a.clone());
            Phase::SplitAssignment
        }
        (EventKind::PlanDistributed(plan), Phase::SplitAssignment) => {
            let assigned = state
                .assignment
                .as_ref()
                .map(|a| &a.pairs[..])
                .unwrap_or(&[]);
            let covered = plan.links().all(|l| {
                assigned.contains(&Pair {
                    source: l.source.clone(),
                    interface: l.interface,
                })
            });
            if !covered {
                return Err(reject("plan uses a link outside the assignment"));
            }
            if plan.total_packets() != plan.file.packet_count {
                return Err(reject("plan does not cover the file"));
            }
            let empty = plan.file.packet_count == 0;
            state.plan = Some(plan.clone());
            if empty {
                Phase::Aggregating
            } else {
                Phase::Transferring
            }
        }
        (EventKind::PacketReceived, Phase::Transferring) => {
            state.received_packets += 1;
            if Some(state.received_packets) == state.expected_packets() {
                Phase::Aggregating
            } else {
                Phase::Transferring
            }
        }
        (EventKind::Aggregated, Phase::Aggregating) => {
            if Some(state.received_packets) != state.expected_packets() {
                return Err(reject("file incomplete"));
            }
            Phase::Complete
        }
        _ => return Err(reject("not allowed by the transition table")),
    };
    state.phase = next;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FileSpec, Link};
    use crate::selection::Method;
    use crate::split::optimal_split;

    fn assignment() -> Assignment {
        Assignment {
            pairs: vec![Pair::new("D1", 1), Pair::new("D2", 2)],
            objective_value: 1859.4,
            method: Method::Exhaustive,
        }
    }

    fn plan(packets: u64) -> SplitPlan {
        let links = [Link::new("D1", 1, 213.3), Link::new("D2", 2, 1646.1)];
        optimal_split(
            &links,
            FileSpec {
                packet_count: packets,
                bits_per_packet: 8,
            },
        )
        .unwrap()
    }

    fn to_transferring(packets: u64) -> SessionState {
        let mut s = SessionState::new();
        for e in [
            EventKind::StartDiscovery,
            EventKind::SourcesDiscovered,
            EventKind::SourcesSelected(assignment()),
            EventKind::PlanDistributed(plan(packets)),
        ] {
            s = advance_session(s, e).unwrap();
        }
        s
    }

    #[test]
    fn idle_to_discovery() {
        let s = advance_session(SessionState::new(), EventKind::StartDiscovery).unwrap();
        assert_eq!(s.phase(), Phase::Discovery);
        assert_eq!(s.coordinator(), Some(Issuer::Network));
        let s = advance_session(
            SessionState::new(),
            LifecycleEvent::device(EventKind::StartDiscovery),
        )
        .unwrap();
        assert_eq!(s.coordinator(), Some(Issuer::Device));
    }

    #[test]
    fn counts_packets_to_completion() {
        let mut s = to_transferring(5);
        assert_eq!(s.phase(), Phase::Transferring);
        assert!(s.plan().is_some());
        for _ in 0..5 {
            s = advance_session(s, EventKind::PacketReceived).unwrap();
        }
        assert_eq!(s.phase(), Phase::Aggregating);
        let err = advance_session(s.clone(), EventKind::PacketReceived).unwrap_err();
        assert_eq!(err.phase, Phase::Aggregating);
        s = advance_session(s, EventKind::Aggregated).unwrap();
        assert_eq!(s.phase(), Phase::Complete);
        assert_eq!(s.received_packets(), 5);
    }

    #[test]
    fn packet_during_discovery_is_rejected() {
        let s = advance_session(SessionState::new(), EventKind::StartDiscovery).unwrap();
        let err = advance_session(s, EventKind::PacketReceived).unwrap_err();
        assert_eq!(err.phase, Phase::Discovery);
        assert_eq!(err.event, "packet_received");
        assert!(err.to_string().contains("discovery"));
    }

    #[test]
    fn abort_from_any_live_phase_only() {
        let s = to_transferring(3);
        let s = advance_session(s, EventKind::Abort).unwrap();
        assert_eq!(s.phase(), Phase::Aborted);
        assert!(advance_session(s, EventKind::Abort).is_err());
        assert!(advance_session(SessionState::new(), EventKind::Abort).is_ok());
    }

    #[test]
    fn plan_must_match_assignment() {
        let mut s = SessionState::new();
        for e in [
            EventKind::StartDiscovery,
            EventKind::SourcesDiscovered,
            EventKind::SourcesSelected(Assignment {
                pairs: vec![Pair::new("D1", 1)],
                ..assignment()
            }),
        ] {
            s = advance_session(s, e).unwrap();
        }
        assert!(s.plan().is_none());
        assert!(advance_session(s, EventKind::PlanDistributed(plan(4))).is_err());
    }
}
