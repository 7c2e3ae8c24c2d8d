use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::{green_report, GreenReport};
use crate::model::{rate_for_level, DeviceId, Scenario};
use crate::selection::{select_sources, AggregateRate};
use crate::split::{
    expected_random_ftl_two_links, ftl, multihoming_plan, optimal_shares, optimal_split,
    relative_gain, single_link_plan, Scheme, TransferOutcome,
};

use super::montecarlo::{run_monte_carlo, MonteCarloSummary};

/// The (source, interface) whose rate level a sweep varies. It is also the
/// single-link baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariedLink {
    pub source: DeviceId,
    pub interface: u8,
}

impl VariedLink {
    pub fn new(source: impl Into<String>, interface: u8) -> Self {
        Self {
            source: DeviceId::new(source),
            interface,
        }
    }

    /// First source, lowest interface index it shares with the sink.
    pub fn first_of(scenario: &Scenario) -> Result<Self> {
        let src = scenario.sources.first().ok_or(Error::NoLinks)?;
        let interface = src
            .common_interfaces(&scenario.sink)
            .into_iter()
            .next()
            .ok_or_else(|| Error::NoCommonInterface {
                device: src.id.clone(),
                sink: scenario.sink.id.clone(),
            })?;
        Ok(Self {
            source: src.id.clone(),
            interface,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub level: u8,
    pub scheme: Scheme,
    /// Continuous share of the first link (expected share for random splits).
    pub alpha_first_link: f64,
    pub ftl_s: f64,
    pub gain_vs_d2d: f64,
    pub green: GreenReport,
    /// Random scheme only, when draws were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub scenario_id: String,
    pub seed: u64,
    pub varied: VariedLink,
    pub rows: Vec<SweepRow>,
}

/// SplitMix64 finalizer over `seed ^ tag`, used to give every sweep level
/// its own Monte Carlo seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = (seed ^ tag.rotate_left(32)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// For every level, sets the varied link to that level and evaluates each
/// requested scheme: plan, latency, gain over the single-link baseline and
/// the green report of one participating device.
///
/// Ds2D schemes run over the links chosen by [`select_sources`]. The random
/// scheme's latency is the closed-form expectation for two links and the
/// Monte Carlo mean otherwise. Rows come out in `levels` x `schemes` order.
pub fn sweep_rate_levels(
    scenario: &Scenario,
    varied: &VariedLink,
    levels: &[u8],
    schemes: &[Scheme],
    mc_draws: u64,
    seed: u64,
) -> Result<SweepResult> {
    for &l in levels {
        rate_for_level(&scenario.rate_table, l)?;
    }
    // Fail early on an unknown varied link.
    scenario.link(&varied.source, varied.interface)?;

    let per_level: Vec<Vec<SweepRow>> = levels
        .par_iter()
        .map(|&level| level_rows(scenario, varied, level, schemes, mc_draws, seed))
        .collect::<Result<_>>()?;

    Ok(SweepResult {
        scenario_id: scenario.id.clone(),
        seed,
        varied: varied.clone(),
        rows: per_level.into_iter().flatten().collect(),
    })
}

fn level_rows(
    base: &Scenario,
    varied: &VariedLink,
    level: u8,
    schemes: &[Scheme],
    mc_draws: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut scn = base.clone();
    let unknown = || Error::UnknownLink {
        device: varied.source.clone(),
        interface: varied.interface,
    };
    let dev = scn.source_mut(&varied.source).ok_or_else(unknown)?;
    if !dev.set_rate_level(varied.interface, level) {
        return Err(unknown());
    }

    let baseline = single_link_plan(&scn.link(&varied.source, varied.interface)?, scn.file)?;
    let t_d2d = ftl(&baseline).ftl_s;

    let needs_ds2d = schemes
        .iter()
        .any(|s| matches!(s, Scheme::Ds2dOptimal | Scheme::Ds2dRandom));
    let ds2d_links = if needs_ds2d {
        select_sources(&scn, &AggregateRate)?.links(&scn)?
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let mut monte_carlo = None;
        let (alpha, outcome, active) = match scheme {
            Scheme::D2dSingle => (1.0, ftl(&baseline), 1),
            Scheme::Ds2dOptimal => {
                let plan = optimal_split(&ds2d_links, scn.file)?;
                (optimal_shares(&ds2d_links)[0], ftl(&plan), 1)
            }
            Scheme::Multihoming => {
                let src = scn.source(&varied.source).ok_or_else(unknown)?;
                let plan = multihoming_plan(src, &scn.sink, &scn.rate_table, scn.file)?;
                let links: Vec<_> = plan.links().cloned().collect();
                let active = plan.allocations.len() as u32;
                (optimal_shares(&links)[0], ftl(&plan), active)
            }
            Scheme::Ds2dRandom => {
                let n = ds2d_links.len();
                if mc_draws > 0 {
                    monte_carlo = Some(run_monte_carlo(
                        &scn,
                        &ds2d_links,
                        mc_draws,
                        derive_seed(seed, u64::from(level)),
                    )?);
                }
                let t = match n {
                    1 => ftl(&single_link_plan(&ds2d_links[0], scn.file)?).ftl_s,
                    2 => expected_random_ftl_two_links(
                        ds2d_links[0].rate_kbps,
                        ds2d_links[1].rate_kbps,
                        scn.file,
                    ),
                    _ => monte_carlo.as_ref().ok_or(Error::NoDraws)?.mean_ftl_s,
                };
                (1.0 / n as f64, TransferOutcome::from_latency(t), 1)
            }
        };
        rows.push(SweepRow {
            level,
            scheme,
            alpha_first_link: alpha,
            ftl_s: outcome.ftl_s,
            gain_vs_d2d: relative_gain(outcome.ftl_s, t_d2d)?,
            green: green_report(&scn, &outcome, active)?,
            monte_carlo,
        });
    }
    Ok(rows)
}
