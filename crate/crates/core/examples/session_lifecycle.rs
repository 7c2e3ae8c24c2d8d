//! Walk a transfer session through its phases, including a rejected event.

use ds2d::model::{FileSpec, Scenario};
use ds2d::selection::{select_sources, AggregateRate};
use ds2d::simkit::{advance_session, EventKind, LifecycleEvent, SessionState};
use ds2d::split::optimal_split;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Scenario::reference();
    s.file = FileSpec {
        packet_count: 5,
        bits_per_packet: 12_000,
    };
    let assignment = select_sources(&s, &AggregateRate)?;
    let plan = optimal_split(&assignment.links(&s)?, s.file)?;

    let mut state = SessionState::new();
    let mut events = vec![
        LifecycleEvent::device(EventKind::StartDiscovery),
        EventKind::SourcesDiscovered.into(),
        EventKind::PacketReceived.into(),
        EventKind::SourcesSelected(assignment).into(),
        EventKind::PlanDistributed(plan).into(),
    ];
    events.extend((0..5).map(|_| EventKind::PacketReceived.into()));
    events.push(EventKind::Aggregated.into());

    for e in events {
        let name = e.kind.name();
        match advance_session(state.clone(), e) {
            Ok(next) => {
                state = next;
                println!(
                    "{name:<18} -> {} ({} packets)",
                    state.phase(),
                    state.received_packets()
                );
            }
            Err(err) => println!("{name:<18} rejected: {err}"),
        }
    }
    println!("coordinator: {:?}", state.coordinator().unwrap());
    Ok(())
}
