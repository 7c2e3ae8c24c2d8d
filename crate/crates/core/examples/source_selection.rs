//! Choose which sources transmit over which sink interfaces.

use ds2d::model::{Device, Scenario};
use ds2d::selection::{enumerate_assignments, greedy_select, select_sources, AggregateRate};
use ds2d::{Objective, Pair};

fn main() -> ds2d::Result<()> {
    let s = Scenario {
        sink: Device::sink("phone", &[1, 2, 3]),
        sources: vec![
            Device::source("tablet", &[(1, 9), (2, 12)]),
            Device::source("laptop", &[(2, 14), (3, 3)]),
            Device::source("watch", &[(1, 2)]),
            Device::source("tv", &[(3, 7)]),
        ],
        ..Scenario::reference()
    };

    println!(
        "{} feasible assignments",
        enumerate_assignments(&s)?.count()
    );

    let best = select_sources(&s, &AggregateRate)?;
    println!("best ({:?}): {:.1} kbps", best.method, best.objective_value);
    for p in &best.pairs {
        println!("  {} -> interface {}", p.source, p.interface);
    }
    let greedy = greedy_select(&s, &AggregateRate)?;
    println!("greedy: {:.1} kbps", greedy.objective_value);

    // Any closure over (scenario, pairs) is an objective. Here: rate, minus a
    // flat cost per extra device woken up.
    let frugal = |sc: &Scenario, pairs: &[Pair]| {
        AggregateRate.evaluate(sc, pairs) - 1500.0 * pairs.len().saturating_sub(1) as f64
    };
    let a = select_sources(&s, &frugal)?;
    println!(
        "frugal: {} pair(s), score {:.1}",
        a.pairs.len(),
        a.objective_value
    );
    Ok(())
}
