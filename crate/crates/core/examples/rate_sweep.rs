//! Sweep the first link over every rate level and write CSV to stdout.

use ds2d::cli::output::sweep_csv;
use ds2d::cli::scenario_io::scenario_hash;
use ds2d::model::Scenario;
use ds2d::simkit::{sweep_rate_levels, VariedLink};
use ds2d::split::Scheme;

fn main() -> ds2d::Result<()> {
    let s = Scenario::reference();
    let v = VariedLink::first_of(&s)?;
    let levels: Vec<u8> = (1..=15).collect();
    let r = sweep_rate_levels(&s, &v, &levels, &Scheme::ALL, 5_000, 42)?;
    print!("{}", sweep_csv(&r, &scenario_hash(&s)));
    Ok(())
}
