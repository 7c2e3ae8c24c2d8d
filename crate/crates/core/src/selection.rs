//! Source/interface selection under the matching constraints: each sink
//! interface talks to at most one source, each source uses at most one
//! interface, and no more links than the sink has interfaces.
//!
//! Small instances are solved exactly by enumerating every feasible partial
//! matching; larger ones fall back to a greedy pass.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DeviceId, Link, Scenario};

/// Largest instance solved by enumeration.
pub const MAX_ENUM_SOURCES: usize = 12;
pub const MAX_ENUM_INTERFACES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub source: DeviceId,
    pub interface: u8,
}

impl Pair {
    pub fn new(source: impl Into<String>, interface: u8) -> Self {
        Self {
            source: DeviceId::new(source),
            interface,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@if{}", self.source, self.interface)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Greedy,
}

/// A feasible set of (source, interface) pairs, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub pairs: Vec<Pair>,
    pub objective_value: f64,
    pub method: Method,
}

impl Assignment {
    /// Links in pair order.
    pub fn links(&self, scenario: &Scenario) -> Result<Vec<Link>> {
        self.pairs
            .iter()
            .map(|p| scenario.link(&p.source, p.interface))
            .collect()
    }

    /// Checks the three matching constraints against `sink_interfaces`.
    pub fn is_feasible(&self, sink_interfaces: usize) -> bool {
        let mut srcs: Vec<_> = self.pairs.iter().map(|p| &p.source).collect();
        let mut ifs: Vec<_> = self.pairs.iter().map(|p| p.interface).collect();
        srcs.sort();
        ifs.sort();
        let n = self.pairs.len();
        srcs.dedup();
        ifs.dedup();
        n <= sink_interfaces && srcs.len() == n && ifs.len() == n
    }
}

/// Scores a set of pairs. Higher is better.
pub trait Objective {
    fn evaluate(&self, scenario: &Scenario, pairs: &[Pair]) -> f64;

    /// Gain from adding `candidate` to `current`.
    fn marginal_gain(&self, scenario: &Scenario, current: &[Pair], candidate: &Pair) -> f64 {
        let mut with = current.to_vec();
        with.push(candidate.clone());
        with.sort();
        self.evaluate(scenario, &with) - self.evaluate(scenario, current)
    }
}

impl<F> Objective for F
where
    F: Fn(&Scenario, &[Pair]) -> f64,
{
    fn evaluate(&self, scenario: &Scenario, pairs: &[Pair]) -> f64 {
        self(scenario, pairs)
    }
}

/// Aggregate rate in kbps. Maximizing it minimizes the optimal-split FTL.
#[derive(Debug, Clone, Copy, Default)]
pub struct AggregateRate;

impl Objective for AggregateRate {
    fn evaluate(&self, scenario: &Scenario, pairs: &[Pair]) -> f64 {
        pairs.iter().map(|p| pair_rate(scenario, p)).sum()
    }

    fn marginal_gain(&self, scenario: &Scenario, _current: &[Pair], candidate: &Pair) -> f64 {
        pair_rate(scenario, candidate)
    }
}

fn pair_rate(scenario: &Scenario, p: &Pair) -> f64 {
    scenario
        .link(&p.source, p.interface)
        .map(|l| l.rate_kbps)
        .unwrap_or(0.0)
}

/// Usable interfaces per source, in scenario order.
fn candidates(scenario: &Scenario) -> Vec<(DeviceId, Vec<u8>)> {
    scenario
        .sources
        .iter()
        .map(|d| {
            let ifs = d
                .common_interfaces(&scenario.sink)
                .into_iter()
                .filter(|&n| d.rate_level(n).is_some())
                .collect();
            (d.id.clone(), ifs)
        })
        .collect()
}

fn infeasible(scenario: &Scenario) -> Error {
    let sink_ifs: Vec<u8> = scenario.sink.interfaces.iter().map(|i| i.index).collect();
    Error::Infeasible(format!(
        "no candidate source shares a data interface with sink {} (sink interfaces {:?})",
        scenario.sink.id, sink_ifs
    ))
}

fn tie_tolerance(best: f64) -> f64 {
    1e-12 * best.abs().max(1.0)
}

/// Lazily yields every nonempty feasible assignment exactly once.
#[derive(Debug)]
pub struct Assignments<'a> {
    scenario: &'a Scenario,
    cands: Vec<(DeviceId, Vec<u8>)>,
    // 0 = source idle, k = k-th candidate interface
    choice: Vec<usize>,
    used: u64,
    done: bool,
}

impl Assignments<'_> {
    fn advance(&mut self) -> bool {
        let mut s = self.choice.len();
        loop {
            if s == 0 {
                return false;
            }
            s -= 1;
            let ifs = &self.cands[s].1;
            if self.choice[s] > 0 {
                self.used &= !(1u64 << ifs[self.choice[s] - 1]);
            }
            let mut k = self.choice[s] + 1;
            while k <= ifs.len() && self.used & (1u64 << ifs[k - 1]) != 0 {
                k += 1;
            }
            if k <= ifs.len() {
                self.choice[s] = k;
                self.used |= 1u64 << ifs[k - 1];
                return true;
            }
            self.choice[s] = 0;
        }
    }

    fn current(&self) -> Vec<Pair> {
        let mut pairs: Vec<Pair> = self
            .choice
            .iter()
            .zip(&self.cands)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, (id, ifs))| Pair {
                source: id.clone(),
                interface: ifs[c - 1],
            })
            .collect();
        pairs.sort();
        pairs
    }
}

impl Iterator for Assignments<'_> {
    type Item = Vec<Pair>;

    fn next(&mut self) -> Option<Vec<Pair>> {
        if self.done || !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

/// Enumerates feasible pair sets; refuses instances above the guard.
pub fn enumerate_pair_sets(scenario: &Scenario) -> Result<Assignments<'_>> {
    let sources = scenario.sources.len();
    let interfaces = scenario.sink.interfaces.len();
    if sources > MAX_ENUM_SOURCES || interfaces > MAX_ENUM_INTERFACES {
        return Err(Error::EnumerationGuard {
            sources,
            interfaces,
        });
    }
    let cands = candidates(scenario);
    if cands.iter().all(|(_, ifs)| ifs.is_empty()) {
        return Err(infeasible(scenario));
    }
    Ok(Assignments {
        scenario,
        choice: vec![0; cands.len()],
        cands,
        used: 0,
        done: false,
    })
}

/// Every nonempty feasible assignment, scored with the default objective.
pub fn enumerate_assignments(scenario: &Scenario) -> Result<impl Iterator<Item = Assignment> + '_> {
    let sets = enumerate_pair_sets(scenario)?;
    let scenario = sets.scenario;
    Ok(sets.map(move |pairs| Assignment {
        objective_value: AggregateRate.evaluate(scenario, &pairs),
        pairs,
        method: Method::Exhaustive,
    }))
}

/// Best feasible assignment under `objective`: exact when the instance is
/// small enough to enumerate, greedy otherwise. Ties go to the
/// lexicographically smallest pair list.
pub fn select_sources(scenario: &Scenario, objective: &dyn Objective) -> Result<Assignment> {
    match enumerate_pair_sets(scenario) {
        Ok(sets) => {
            let mut best: Option<(f64, Vec<Pair>)> = None;
            for pairs in sets {
                let v = objective.evaluate(scenario, &pairs);
                let better = match &best {
                    None => true,
                    Some((bv, bp)) => {
                        let tol = tie_tolerance(*bv);
                        v > bv + tol || ((v - bv).abs() <= tol && pairs < *bp)
                    }
                };
                if better {
                    best = Some((v, pairs));
                }
            }
            let (objective_value, pairs) = best.ok_or_else(|| infeasible(scenario))?;
            Ok(Assignment {
                pairs,
                objective_value,
                method: Method::Exhaustive,
            })
        }
        Err(Error::EnumerationGuard { .. }) => greedy_select(scenario, objective),
        Err(e) => Err(e),
    }
}

/// Repeatedly adds the feasible pair with the largest positive marginal gain.
pub fn greedy_select(scenario: &Scenario, objective: &dyn Objective) -> Result<Assignment> {
    let cands: Vec<Pair> = candidates(scenario)
        .into_iter()
        .flat_map(|(id, ifs)| {
            ifs.into_iter().map(move |n| Pair {
                source: id.clone(),
                interface: n,
            })
        })
        .collect();
    if cands.is_empty() {
        return Err(infeasible(scenario));
    }
    let limit = scenario.sink.interfaces.len();
    let mut chosen: Vec<Pair> = Vec::new();
    while chosen.len() < limit {
        let mut best: Option<(f64, &Pair)> = None;
        for c in &cands {
            if chosen
                .iter()
                .any(|p| p.source == c.source || p.interface == c.interface)
            {
                continue;
            }
            let g = objective.marginal_gain(scenario, &chosen, c);
            let better = match best {
                None => true,
                Some((bg, bp)) => {
                    let tol = tie_tolerance(bg);
                    g > bg + tol || ((g - bg).abs() <= tol && c < bp)
                }
            };
            if better {
                best = Some((g, c));
            }
        }
        match best {
            // Always return at least one pair.
            Some((g, c)) if g > 0.0 || chosen.is_empty() => {
                chosen.push(c.clone());
                chosen.sort();
            }
            _ => break,
        }
    }
    Ok(Assignment {
        objective_value: objective.evaluate(scenario, &chosen),
        pairs: chosen,
        method: Method::Greedy,
    })
}
