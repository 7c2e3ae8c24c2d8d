//! Split the reference file over two sources and compare latencies.

use ds2d::model::Scenario;
use ds2d::split::{continuous_optimal_ftl, ftl, optimal_split, relative_gain, single_link_plan};
use ds2d::DeviceId;

fn main() -> ds2d::Result<()> {
    let s = Scenario::reference();
    let d1 = s.link(&DeviceId::new("D1"), 1)?;
    let d2 = s.link(&DeviceId::new("D2"), 2)?;
    let links = [d1.clone(), d2];

    let plan = optimal_split(&links, s.file)?;
    for a in &plan.allocations {
        println!(
            "{}/{}: {} packets at {} kbps",
            a.link.source, a.link.interface, a.packets, a.link.rate_kbps
        );
    }

    let t = ftl(&plan).ftl_s;
    let t_single = ftl(&single_link_plan(&d1, s.file)?).ftl_s;
    println!("single link   {t_single:.2} s");
    println!(
        "optimal split {t:.2} s (bound {:.2} s)",
        continuous_optimal_ftl(&links, s.file)
    );
    println!("gain          {:.1}%", 100.0 * relative_gain(t, t_single)?);
    Ok(())
}
