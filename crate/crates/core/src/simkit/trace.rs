use serde::Serialize;

use crate::model::Link;
use crate::split::SplitPlan;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketEvent {
    /// Time the last bit of the packet leaves the link.
    pub time_s: f64,
    /// Index into [`PacketTrace::links`].
    pub link: usize,
    /// Position of the packet within its link's share, from 0.
    pub packet: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketTrace {
    pub links: Vec<Link>,
    /// Sorted by time, then link, then packet.
    pub events: Vec<PacketEvent>,
    pub completion_s: Vec<f64>,
}

impl PacketTrace {
    /// When the sink holds the whole file.
    pub fn completion(&self) -> f64 {
        self.completion_s.iter().copied().fold(0.0, f64::max)
    }
}

/// Replays `plan` packet by packet: every link sends its share back to back
/// from time zero, one packet every `B / R` seconds.
pub fn simulate_packet_transfer(plan: &SplitPlan) -> PacketTrace {
    let bits = plan.file.bits_per_packet as f64;
    let total: u64 = plan.total_packets();
    let mut events = Vec::with_capacity(total as usize);
    let mut completion_s = Vec::with_capacity(plan.allocations.len());

    for (li, alloc) in plan.allocations.iter().enumerate() {
        let per_packet = bits / alloc.link.rate_bps();
        let mut clock = 0.0;
        for packet in 0..alloc.packets {
            clock += per_packet;
            events.push(PacketEvent {
                time_s: clock,
                link: li,
                packet,
            });
        }
        completion_s.push(clock);
    }
    events.sort_by(|a, b| {
        a.time_s
            .total_cmp(&b.time_s)
            .then(a.link.cmp(&b.link))
            .then(a.packet.cmp(&b.packet))
    });

    PacketTrace {
        links: plan.links().cloned().collect(),
        events,
        completion_s,
    }
}
