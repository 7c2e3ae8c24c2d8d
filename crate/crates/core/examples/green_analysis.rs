//! Energy, cost, carbon and battery life of each scheme at the lowest rate.

use ds2d::green::BatteryLife;
use ds2d::model::Scenario;
use ds2d::simkit::{sweep_rate_levels, VariedLink};
use ds2d::split::Scheme;

fn main() -> ds2d::Result<()> {
    let s = Scenario::reference();
    let v = VariedLink::first_of(&s)?;
    let r = sweep_rate_levels(&s, &v, &[1], &Scheme::ALL, 0, 0)?;
    println!("scheme       energy_wh  kwh/yr  usd/yr  co2_lb  life_h  full charge");
    for row in &r.rows {
        let g = &row.green;
        let life = match g.battery_life {
            BatteryLife::Hours(h) => format!("{h:6.2}"),
            BatteryLife::Unbounded => "   inf".to_string(),
        };
        println!(
            "{:<12} {:9.3} {:7.3} {:7.4} {:7.3} {life}  {}",
            row.scheme.as_str(),
            g.energy_wh,
            g.annual_kwh,
            g.annual_cost_usd,
            g.annual_co2_lb,
            if g.completes_on_full_charge {
                "yes"
            } else {
                "no"
            }
        );
    }
    Ok(())
}
