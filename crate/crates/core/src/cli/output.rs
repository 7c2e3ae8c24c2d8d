//! Machine-readable sweep output. Numbers are written with 12 significant
//! digits so files are byte-identical across platforms.

use serde::Serialize;
use serde_json::Value;

use crate::green::BatteryLife;
use crate::simkit::{SweepResult, SweepRow};
use crate::split::Scheme;

pub const FORMAT_VERSION: u32 = 1;

pub const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const CSV_COLUMNS: [&str; 14] = [
    "scenario_id",
    "seed",
    "level",
    "scheme",
    "alpha_first_link",
    "ftl_s",
    "gain_vs_d2d",
    "energy_wh",
    "annual_kwh",
    "annual_cost_usd",
    "annual_co2_lb",
    "i_source_ma",
    "battery_life_h",
    "completes_on_charge",
];

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent notation outside `[1e-5, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_owned()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One flat CSV record.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub scenario_id: String,
    pub seed: u64,
    pub level: u8,
    pub scheme: Scheme,
    pub alpha_first_link: f64,
    pub ftl_s: f64,
    pub gain_vs_d2d: f64,
    pub energy_wh: f64,
    pub annual_kwh: f64,
    pub annual_cost_usd: f64,
    pub annual_co2_lb: f64,
    pub i_source_ma: f64,
    pub battery_life: BatteryLife,
    pub completes_on_charge: bool,
}

impl OutputRow {
    pub fn new(result: &SweepResult, row: &SweepRow) -> Self {
        let g = &row.green;
        Self {
            scenario_id: result.scenario_id.clone(),
            seed: result.seed,
            level: row.level,
            scheme: row.scheme,
            alpha_first_link: row.alpha_first_link,
            ftl_s: row.ftl_s,
            gain_vs_d2d: row.gain_vs_d2d,
            energy_wh: g.energy_wh,
            annual_kwh: g.annual_kwh,
            annual_cost_usd: g.annual_cost_usd,
            annual_co2_lb: g.annual_co2_lb,
            i_source_ma: g.load_current_ma,
            battery_life: g.battery_life,
            completes_on_charge: g.completes_on_full_charge,
        }
    }

    pub fn record(&self) -> [String; 14] {
        let life = match self.battery_life {
            BatteryLife::Hours(h) => format_number(h),
            BatteryLife::Unbounded => "unbounded".to_owned(),
        };
        [
            self.scenario_id.clone(),
            self.seed.to_string(),
            self.level.to_string(),
            self.scheme.to_string(),
            format_number(self.alpha_first_link),
            format_number(self.ftl_s),
            format_number(self.gain_vs_d2d),
            format_number(self.energy_wh),
            format_number(self.annual_kwh),
            format_number(self.annual_cost_usd),
            format_number(self.annual_co2_lb),
            format_number(self.i_source_ma),
            life,
            self.completes_on_charge.to_string(),
        ]
    }
}

/// CSV with a leading `#` metadata line and one header row.
pub fn sweep_csv(result: &SweepResult, scenario_hash: &str) -> String {
    let mut out = format!(
        "# tool={TOOL} format_version={FORMAT_VERSION} scenario_sha256={scenario_hash} varied={}/{}\n",
        result.varied.source, result.varied.interface
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for row in &result.rows {
        w.write_record(OutputRow::new(result, row).record())
            .expect("in-memory write");
    }
    let body = w.into_inner().expect("in-memory flush");
    out.push_str(std::str::from_utf8(&body).expect("utf-8 csv"));
    out
}

#[derive(Serialize)]
struct Document<'a> {
    tool: &'static str,
    format_version: u32,
    scenario_sha256: &'a str,
    sweep: &'a SweepResult,
}

/// Single JSON document holding metadata, every row, and Monte Carlo
/// summaries where present.
pub fn sweep_structured(result: &SweepResult, scenario_hash: &str) -> String {
    let doc = Document {
        tool: TOOL,
        format_version: FORMAT_VERSION,
        scenario_sha256: scenario_hash,
        sweep: result,
    };
    let mut value = serde_json::to_value(&doc).expect("sweep serializes");
    round_floats(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format_number(x).parse().expect("formatted number parses");
            if let Some(num) = serde_json::Number::from_f64(rounded) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_like_printf_g() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(3094.2334739803), "3094.23347398");
        assert_eq!(format_number(-0.25), "-0.25");
        assert_eq!(format_number(1e-7), "1e-07");
        assert_eq!(format_number(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_number(0.000123), "0.000123");
        assert_eq!(format_number(999999999999.9), "1e+12");
    }

    proptest! {
        #[test]
        fn twelve_digits_round_trip(x in prop::num::f64::NORMAL) {
            let back: f64 = format_number(x).parse().unwrap();
            prop_assert!(((back - x) / x).abs() <= 1e-11);
        }
    }
}
