//! Domain types: rate table, file and battery descriptions, devices, links
//! and the scenario that ties them together.
//!
//! Everything here is plain data. Values read from a scenario file are not
//! trusted until [`validate_scenario`] has accepted them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of SINR-derived rate levels.
pub const RATE_LEVELS: u8 = 15;

/// Highest interface index a device may expose.
pub const MAX_INTERFACE_INDEX: u8 = 16;

/// Achievable data rate per level, in kbps (1 kbps = 1000 bit/s).
pub const DEFAULT_RATES_KBPS: [f64; 15] = [
    213.3, 328.2, 527.8, 842.2, 1227.8, 1646.1, 2067.2, 2679.7, 3368.8, 3822.7, 4651.2, 5463.2,
    6332.8, 7161.3, 7776.6,
];

/// Maps rate level `1..=15` to an achieved data rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateTable {
    /// Entry `i` is the rate of level `i + 1`.
    pub rates_kbps: Vec<f64>,
}

impl Default for RateTable {
    fn default() -> Self {
        Self {
            rates_kbps: DEFAULT_RATES_KBPS.to_vec(),
        }
    }
}

impl RateTable {
    /// Builds a table, rejecting anything that is not 15 strictly increasing
    /// positive rates.
    pub fn new(rates_kbps: Vec<f64>) -> Result<Self> {
        let table = Self { rates_kbps };
        let mut violations = Vec::new();
        table.check("rate_table", &mut violations);
        if violations.is_empty() {
            Ok(table)
        } else {
            Err(Error::Validation(ValidationErrors(violations)))
        }
    }

    pub fn rate_for_level(&self, level: u8) -> Result<f64> {
        rate_for_level(self, level)
    }

    /// `(level, rate)` pairs in level order.
    pub fn levels(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        self.rates_kbps
            .iter()
            .enumerate()
            .map(|(i, &r)| (i as u8 + 1, r))
    }

    fn check(&self, path: &str, out: &mut Vec<Violation>) {
        if self.rates_kbps.len() != RATE_LEVELS as usize {
            out.push(Violation::new(
                format!("{path}.rates_kbps"),
                format!(
                    "expected {RATE_LEVELS} entries, found {}",
                    self.rates_kbps.len()
                ),
            ));
        }
        for (i, &r) in self.rates_kbps.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                out.push(Violation::new(
                    format!("{path}.rates_kbps[{i}]"),
                    format!("rate must be positive and finite, got {r}"),
                ));
            }
        }
        for (i, w) in self.rates_kbps.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                out.push(Violation::new(
                    format!("{path}.rates_kbps[{}]", i + 1),
                    format!(
                        "rates must strictly increase with level ({} !< {})",
                        w[0], w[1]
                    ),
                ));
            }
        }
    }
}

/// Looks up the rate of `level` in `table`.
pub fn rate_for_level(table: &RateTable, level: u8) -> Result<f64> {
    if !(1..=RATE_LEVELS).contains(&level) {
        return Err(Error::LevelOutOfRange(i64::from(level)));
    }
    table
        .rates_kbps
        .get(usize::from(level - 1))
        .copied()
        .ok_or(Error::LevelOutOfRange(i64::from(level)))
}

/// A file cut into fixed-size packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub packet_count: u64,
    pub bits_per_packet: u64,
}

impl Default for FileSpec {
    /// 55k packets of 1500 bytes.
    fn default() -> Self {
        Self {
            packet_count: 55_000,
            bits_per_packet: 1500 * 8,
        }
    }
}

impl FileSpec {
    pub fn total_bits(&self) -> u64 {
        self.packet_count * self.bits_per_packet
    }

    fn check(&self, path: &str, out: &mut Vec<Violation>) {
        if self.packet_count < 1 {
            out.push(Violation::new(
                format!("{path}.packet_count"),
                "at least one packet required",
            ));
        }
        if self.packet_count > 1_000_000_000 {
            out.push(Violation::new(
                format!("{path}.packet_count"),
                "at most 10^9 packets supported",
            ));
        }
        if self.bits_per_packet < 8 {
            out.push(Violation::new(
                format!("{path}.bits_per_packet"),
                "a packet carries at least 8 bits",
            ));
        }
        if self.bits_per_packet > 1_000_000 {
            out.push(Violation::new(
                format!("{path}.bits_per_packet"),
                "at most 10^6 bits per packet supported",
            ));
        }
    }
}

/// Battery of a source device plus the assumed transfer duty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryProfile {
    pub charge_mah: f64,
    pub energy_wh: f64,
    /// File transfers per hour, used to turn per-transfer energy into an
    /// average load current.
    pub duty_transfers_per_hour: f64,
}

impl Default for BatteryProfile {
    fn default() -> Self {
        Self {
            charge_mah: 1440.0,
            energy_wh: 5.45,
            duty_transfers_per_hour: 2.0,
        }
    }
}

impl BatteryProfile {
    /// Nominal voltage `E_batt / (I_batt / 1000)`.
    pub fn nominal_voltage(&self) -> f64 {
        self.energy_wh / (self.charge_mah / 1000.0)
    }

    fn check(&self, path: &str, out: &mut Vec<Violation>) {
        for (key, v) in [
            ("charge_mah", self.charge_mah),
            ("energy_wh", self.energy_wh),
            ("duty_transfers_per_hour", self.duty_transfers_per_hour),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(Violation::new(
                    format!("{path}.{key}"),
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sink,
    CandidateSource,
}

/// Opaque device identifier. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeviceId(pub String);

impl DeviceId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DeviceId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// One radio interface of a device.
///
/// Sources must carry a rate level; the sink may leave it out because link
/// rates are taken from the transmitting side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interface {
    pub index: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_level: Option<u8>,
}

impl Interface {
    pub fn new(index: u8, rate_level: u8) -> Self {
        Self {
            index,
            rate_level: Some(rate_level),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub id: DeviceId,
    pub role: Role,
    pub interfaces: Vec<Interface>,
}

impl Device {
    pub fn source(id: impl Into<String>, interfaces: &[(u8, u8)]) -> Self {
        Self {
            id: DeviceId::new(id),
            role: Role::CandidateSource,
            interfaces: interfaces
                .iter()
                .map(|&(index, level)| Interface::new(index, level))
                .collect(),
        }
    }

    pub fn sink(id: impl Into<String>, interfaces: &[u8]) -> Self {
        Self {
            id: DeviceId::new(id),
            role: Role::Sink,
            interfaces: interfaces
                .iter()
                .map(|&index| Interface {
                    index,
                    rate_level: None,
                })
                .collect(),
        }
    }

    pub fn has_interface(&self, index: u8) -> bool {
        self.interfaces.iter().any(|i| i.index == index)
    }

    pub fn rate_level(&self, index: u8) -> Option<u8> {
        self.interfaces
            .iter()
            .find(|i| i.index == index)
            .and_then(|i| i.rate_level)
    }

    /// Sets the rate level of an existing interface; returns false if the
    /// device has no such interface.
    pub fn set_rate_level(&mut self, index: u8, level: u8) -> bool {
        match self.interfaces.iter_mut().find(|i| i.index == index) {
            Some(i) => {
                i.rate_level = Some(level);
                true
            }
            None => false,
        }
    }

    /// Interface indices shared with `other`, ascending.
    pub fn common_interfaces(&self, other: &Device) -> Vec<u8> {
        let mine: BTreeSet<u8> = self.interfaces.iter().map(|i| i.index).collect();
        let theirs: BTreeSet<u8> = other.interfaces.iter().map(|i| i.index).collect();
        mine.intersection(&theirs).copied().collect()
    }

    fn check(&self, path: &str, expected: Role, out: &mut Vec<Violation>) {
        if self.role != expected {
            out.push(Violation::new(
                format!("{path}.role"),
                format!("expected role {expected:?}, found {:?}", self.role),
            ));
        }
        if self.id.0.is_empty() {
            out.push(Violation::new(format!("{path}.id"), "device id is empty"));
        }
        if self.interfaces.is_empty() {
            out.push(Violation::new(
                format!("{path}.interfaces"),
                "device has no interfaces",
            ));
        }
        let mut seen = BTreeSet::new();
        for (k, iface) in self.interfaces.iter().enumerate() {
            let p = format!("{path}.interfaces[{k}]");
            if !(1..=MAX_INTERFACE_INDEX).contains(&iface.index) {
                out.push(Violation::new(
                    format!("{p}.index"),
                    format!(
                        "interface index {} outside 1..={MAX_INTERFACE_INDEX}",
                        iface.index
                    ),
                ));
            }
            if !seen.insert(iface.index) {
                out.push(Violation::new(
                    format!("{p}.index"),
                    format!("duplicate interface index {}", iface.index),
                ));
            }
            match (iface.rate_level, expected) {
                (None, Role::CandidateSource) => out.push(Violation::new(
                    format!("{p}.rate_level"),
                    "source interface has no rate level",
                )),
                (Some(l), _) if !(1..=RATE_LEVELS).contains(&l) => out.push(Violation::new(
                    format!("{p}.rate_level"),
                    format!("rate level {l} outside 1..={RATE_LEVELS}"),
                )),
                _ => {}
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Economics {
    pub price_cents_per_kwh: f64,
    pub carbon_lb_per_kwh: f64,
    pub transfers_per_year: u64,
    pub random_seed: u64,
}

impl Default for Economics {
    /// 12 cents/kWh, 1.21 lb CO2/kWh, one file per day.
    fn default() -> Self {
        Self {
            price_cents_per_kwh: 12.0,
            carbon_lb_per_kwh: 1.21,
            transfers_per_year: 365,
            random_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub file: FileSpec,
    pub battery: BatteryProfile,
    pub economics: Economics,
    #[serde(default)]
    pub rate_table: RateTable,
    pub sink: Device,
    pub sources: Vec<Device>,
}

impl Scenario {
    /// The reference two-source set-up: `D1` on interface 1 at level 1 (the
    /// varied link), `D2` on interface 2 at level 6. `D1` also reaches the
    /// sink over interface 2 at level 6 so that it can act as a multi-homed
    /// source.
    pub fn reference() -> Self {
        Self {
            id: "default".to_owned(),
            file: FileSpec::default(),
            battery: BatteryProfile::default(),
            economics: Economics::default(),
            rate_table: RateTable::default(),
            sink: Device::sink("D0", &[1, 2]),
            sources: vec![
                Device::source("D1", &[(1, 1), (2, 6)]),
                Device::source("D2", &[(2, 6)]),
            ],
        }
    }

    pub fn source(&self, id: &DeviceId) -> Option<&Device> {
        self.sources.iter().find(|d| &d.id == id)
    }

    pub fn source_mut(&mut self, id: &DeviceId) -> Option<&mut Device> {
        self.sources.iter_mut().find(|d| &d.id == id)
    }

    /// Builds the link from `source` to the sink over `interface`.
    pub fn link(&self, source: &DeviceId, interface: u8) -> Result<Link> {
        let unknown = || Error::UnknownLink {
            device: source.clone(),
            interface,
        };
        let dev = self.source(source).ok_or_else(unknown)?;
        if !self.sink.has_interface(interface) {
            return Err(unknown());
        }
        let level = dev.rate_level(interface).ok_or_else(unknown)?;
        Ok(Link {
            source: source.clone(),
            interface,
            rate_kbps: self.rate_table.rate_for_level(level)?,
        })
    }

    pub fn validated(self) -> std::result::Result<Self, ValidationErrors> {
        validate_scenario(&self).map(|()| self)
    }
}

/// A usable (source, interface) pair and its rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub source: DeviceId,
    pub interface: u8,
    pub rate_kbps: f64,
}

impl Link {
    pub fn new(source: impl Into<String>, interface: u8, rate_kbps: f64) -> Self {
        Self {
            source: DeviceId::new(source),
            interface,
            rate_kbps,
        }
    }

    pub fn rate_bps(&self) -> f64 {
        self.rate_kbps * 1000.0
    }
}

/// One broken invariant, with the path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<Violation>);

impl ValidationErrors {
    pub fn iter(&self) -> std::slice::Iter<'_, Violation> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// Checks every scenario invariant and reports all violations at once.
pub fn validate_scenario(s: &Scenario) -> std::result::Result<(), ValidationErrors> {
    let mut out = Vec::new();
    if s.id.is_empty() {
        out.push(Violation::new("id", "scenario id is empty"));
    }
    s.file.check("file", &mut out);
    s.battery.check("battery", &mut out);
    s.rate_table.check("rate_table", &mut out);

    let e = &s.economics;
    for (key, v) in [
        ("price_cents_per_kwh", e.price_cents_per_kwh),
        ("carbon_lb_per_kwh", e.carbon_lb_per_kwh),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            out.push(Violation::new(
                format!("economics.{key}"),
                format!("must be non-negative and finite, got {v}"),
            ));
        }
    }
    if e.transfers_per_year < 1 {
        out.push(Violation::new(
            "economics.transfers_per_year",
            "at least one transfer per year",
        ));
    }

    s.sink.check("sink", Role::Sink, &mut out);
    if s.sources.is_empty() {
        out.push(Violation::new("sources", "sources empty"));
    }
    let mut ids = BTreeSet::new();
    ids.insert(&s.sink.id);
    for (k, d) in s.sources.iter().enumerate() {
        let path = format!("sources[{k}]");
        d.check(&path, Role::CandidateSource, &mut out);
        if !ids.insert(&d.id) {
            out.push(Violation::new(
                format!("{path}.id"),
                format!("duplicate device id {}", d.id),
            ));
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(ValidationErrors(out))
    }
}
