//! Energy, electricity cost, carbon footprint and battery life of a source
//! device taking part in a transfer.
//!
//! A device is assumed to drain one full battery-equivalent (`E_batt`) per
//! hour per active data interface while transmitting. The coordination
//! interface is not counted.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{BatteryProfile, Scenario};
use crate::split::TransferOutcome;

/// Share of nominal capacity available in practice.
pub const BATTERY_DERATING: f64 = 0.70;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BatteryLife {
    Hours(f64),
    /// No load current.
    Unbounded,
}

impl BatteryLife {
    pub fn hours(self) -> Option<f64> {
        match self {
            BatteryLife::Hours(h) => Some(h),
            BatteryLife::Unbounded => None,
        }
    }

    /// Whether the battery lasts at least `seconds`.
    pub fn covers(self, seconds: f64) -> bool {
        match self {
            BatteryLife::Hours(h) => h >= seconds / 3600.0,
            BatteryLife::Unbounded => true,
        }
    }
}

impl fmt::Display for BatteryLife {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatteryLife::Hours(h) => write!(f, "{h}"),
            BatteryLife::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for BatteryLife {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BatteryLife::Hours(h) => s.serialize_f64(*h),
            BatteryLife::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenReport {
    pub energy_wh: f64,
    pub annual_kwh: f64,
    pub annual_cost_usd: f64,
    pub annual_co2_lb: f64,
    pub load_current_ma: f64,
    pub battery_life: BatteryLife,
    pub completes_on_full_charge: bool,
}

/// Energy in Wh spent by a device keeping `active_interfaces` radios busy
/// for `seconds`.
pub fn transfer_energy(
    battery: &BatteryProfile,
    seconds: f64,
    active_interfaces: u32,
) -> Result<f64> {
    if !(seconds >= 0.0) {
        return Err(Error::NegativeDuration(seconds));
    }
    if active_interfaces == 0 {
        return Err(Error::NoActiveInterface);
    }
    Ok(f64::from(active_interfaces) * battery.energy_wh * seconds / 3600.0)
}

pub fn annual_energy_kwh(energy_per_transfer_wh: f64, transfers_per_year: u64) -> f64 {
    energy_per_transfer_wh * transfers_per_year as f64 / 1000.0
}

/// Yearly electricity cost in USD.
pub fn annual_cost(
    energy_per_transfer_wh: f64,
    transfers_per_year: u64,
    price_cents_per_kwh: f64,
) -> f64 {
    annual_energy_kwh(energy_per_transfer_wh, transfers_per_year) * price_cents_per_kwh / 100.0
}

/// Pounds of CO2 for `annual_kwh`.
pub fn annual_carbon(annual_kwh: f64, lb_per_kwh: f64) -> f64 {
    annual_kwh * lb_per_kwh
}

/// Average load current (mA) of a device running `duty` transfers per hour
/// at nominal battery voltage.
pub fn load_current(battery: &BatteryProfile, energy_per_transfer_wh: f64) -> f64 {
    battery.duty_transfers_per_hour * energy_per_transfer_wh / battery.nominal_voltage() * 1000.0
}

pub fn battery_life(battery: &BatteryProfile, load_current_ma: f64) -> BatteryLife {
    if load_current_ma > 0.0 {
        BatteryLife::Hours(battery.charge_mah / load_current_ma * BATTERY_DERATING)
    } else {
        BatteryLife::Unbounded
    }
}

/// Full green analysis of one device whose transfer took `outcome.ftl_s`
/// with `active_interfaces` data radios on.
pub fn green_report(
    scenario: &Scenario,
    outcome: &TransferOutcome,
    active_interfaces: u32,
) -> Result<GreenReport> {
    let battery = &scenario.battery;
    let econ = &scenario.economics;
    let energy_wh = transfer_energy(battery, outcome.ftl_s, active_interfaces)?;
    let annual_kwh = annual_energy_kwh(energy_wh, econ.transfers_per_year);
    let load_current_ma = load_current(battery, energy_wh);
    let life = battery_life(battery, load_current_ma);
    Ok(GreenReport {
        energy_wh,
        annual_kwh,
        annual_cost_usd: annual_cost(energy_wh, econ.transfers_per_year, econ.price_cents_per_kwh),
        annual_co2_lb: annual_carbon(annual_kwh, econ.carbon_lb_per_kwh),
        load_current_ma,
        battery_life: life,
        completes_on_full_charge: life.covers(outcome.ftl_s),
    })
}
