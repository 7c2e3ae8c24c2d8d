//! Random splits: closed-form expectation against a seeded Monte Carlo run.

use ds2d::model::{Link, Scenario, DEFAULT_RATES_KBPS};
use ds2d::simkit::run_monte_carlo;
use ds2d::split::expected_random_ftl_two_links;

fn main() -> ds2d::Result<()> {
    let s = Scenario::reference();
    let r2 = DEFAULT_RATES_KBPS[5];
    for level in [1usize, 4, 8, 12] {
        let r1 = DEFAULT_RATES_KBPS[level - 1];
        let links = [Link::new("D1", 1, r1), Link::new("D2", 2, r2)];
        let mc = run_monte_carlo(&s, &links, 50_000, 11)?;
        let exact = expected_random_ftl_two_links(r1, r2, s.file);
        println!(
            "level {level:>2}: E[t] = {exact:8.2} s, MC mean = {:8.2} +/- {:.2} s",
            mc.mean_ftl_s,
            mc.std_err_s.unwrap_or(0.0)
        );
    }

    // Histogram of the level-1 latency distribution.
    let links = [
        Link::new("D1", 1, DEFAULT_RATES_KBPS[0]),
        Link::new("D2", 2, r2),
    ];
    let h = run_monte_carlo(&s, &links, 50_000, 11)?.histogram;
    let width = (h.hi - h.lo) / h.counts.len() as f64;
    let peak = *h.counts.iter().max().unwrap_or(&1);
    for (i, c) in h.counts.iter().enumerate().step_by(5) {
        let bar = "#".repeat((40 * c / peak) as usize);
        println!("{:8.1} s | {bar}", h.lo + i as f64 * width);
    }
    Ok(())
}
