use ds2d::green::{transfer_energy, BatteryLife};
use ds2d::model::{Device, FileSpec, Link, Scenario, DEFAULT_RATES_KBPS};
use ds2d::selection::{greedy_select, select_sources, AggregateRate, Objective};
use ds2d::simkit::{
    advance_session, simulate_packet_transfer, sweep_rate_levels, EventKind, Phase, SessionState,
    VariedLink,
};
use ds2d::split::{
    continuous_optimal_ftl, expected_random_ftl_two_links, ftl, optimal_shares, optimal_split,
    random_split, relative_gain, single_link_plan, Scheme, SplitPlan,
};
use ds2d::{green_report, TransferOutcome};
use proptest::prelude::*;

fn links_strategy(max: usize) -> impl Strategy<Value = Vec<Link>> {
    prop::collection::vec(1.0f64..10_000.0, 1..=max).prop_map(|rates| {
        rates
            .into_iter()
            .enumerate()
            .map(|(i, r)| Link::new(format!("S{i}"), i as u8 + 1, r))
            .collect()
    })
}

fn file_strategy() -> impl Strategy<Value = FileSpec> {
    (1u64..100_000, 8u64..20_000).prop_map(|(packet_count, bits_per_packet)| FileSpec {
        packet_count,
        bits_per_packet,
    })
}

/// Random scenario within the enumeration limit.
fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(n_ifaces, n_sources)| {
        let source = prop::collection::vec((1u8..=n_ifaces as u8 + 1, 1u8..=15), 1..=3);
        prop::collection::vec(source, n_sources).prop_map(move |srcs| {
            let sink_ifaces: Vec<u8> = (1..=n_ifaces as u8).collect();
            let sources = srcs
                .into_iter()
                .enumerate()
                .map(|(k, mut ifs)| {
                    ifs.sort_by_key(|x| x.0);
                    ifs.dedup_by_key(|x| x.0);
                    Device::source(format!("S{k}"), &ifs)
                })
                .collect();
            Scenario {
                sink: Device::sink("SINK", &sink_ifaces),
                sources,
                ..Scenario::reference()
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn plans_conserve_packets(links in links_strategy(6), file in file_strategy(), seed: u64) {
        let opt = optimal_split(&links, file).unwrap();
        let rnd = random_split(&links, file, seed).unwrap();
        prop_assert_eq!(opt.total_packets(), file.packet_count);
        prop_assert_eq!(rnd.total_packets(), file.packet_count);
        prop_assert_eq!(single_link_plan(&links[0], file).unwrap().total_packets(), file.packet_count);
    }

    #[test]
    fn optimal_within_one_packet_time_of_bound(links in links_strategy(6), file in file_strategy()) {
        let bound = continuous_optimal_ftl(&links, file);
        let t = ftl(&optimal_split(&links, file).unwrap()).ftl_s;
        let min_rate = links.iter().map(Link::rate_bps).fold(f64::INFINITY, f64::min);
        let slack = file.bits_per_packet as f64 / min_rate;
        prop_assert!(t >= bound * (1.0 - 1e-12));
        prop_assert!(t <= bound + slack * (1.0 + 1e-12));
    }

    #[test]
    fn no_plan_beats_the_bound(links in links_strategy(5), file in file_strategy(), seed: u64) {
        let t = ftl(&random_split(&links, file, seed).unwrap()).ftl_s;
        prop_assert!(t >= continuous_optimal_ftl(&links, file) * (1.0 - 1e-12));
    }

    #[test]
    fn one_link_optimal_is_single_link(rate in 1.0f64..10_000.0, file in file_strategy()) {
        let link = Link::new("S0", 1, rate);
        let a = optimal_split(std::slice::from_ref(&link), file).unwrap();
        let b = single_link_plan(&link, file).unwrap();
        prop_assert_eq!(a.allocations, b.allocations);
    }

    #[test]
    fn continuous_gain_identity(links in links_strategy(6), j in 0usize..6) {
        let j = j % links.len();
        let file = FileSpec::default();
        let t_single = file.total_bits() as f64 / links[j].rate_bps();
        let g = relative_gain(continuous_optimal_ftl(&links, file), t_single).unwrap();
        let total: f64 = links.iter().map(|l| l.rate_kbps).sum();
        prop_assert!((g - (1.0 - links[j].rate_kbps / total)).abs() < 1e-12);
    }

    #[test]
    fn packet_simulation_agrees(links in links_strategy(4), packets in 1u64..3000, seed: u64) {
        let file = FileSpec { packet_count: packets, bits_per_packet: 12_000 };
        let plan = random_split(&links, file, seed).unwrap();
        let sim = simulate_packet_transfer(&plan).completion();
        let t = ftl(&plan).ftl_s;
        prop_assert!((sim - t).abs() <= 1e-6 * t.max(1e-300));
    }

    #[test]
    fn energy_monotone(t1 in 0.0f64..1e5, dt in 0.0f64..1e5, a in 1u32..5) {
        let b = Scenario::reference().battery;
        let e1 = transfer_energy(&b, t1, a).unwrap();
        prop_assert!(transfer_energy(&b, t1 + dt, a).unwrap() >= e1);
        prop_assert!(transfer_energy(&b, t1, a + 1).unwrap() >= e1);
        // A-scaling identity
        let one = transfer_energy(&b, t1, 1).unwrap();
        prop_assert!((e1 - f64::from(a) * one).abs() <= 1e-12 * e1.max(1.0));
    }

    #[test]
    fn ds2d_energy_never_exceeds_d2d(l1 in 1u8..=15, l2 in 1u8..=15) {
        let s = Scenario::reference();
        let (r1, r2) = (DEFAULT_RATES_KBPS[l1 as usize - 1], DEFAULT_RATES_KBPS[l2 as usize - 1]);
        let links = [Link::new("D1", 1, r1), Link::new("D2", 2, r2)];
        let opt = ftl(&optimal_split(&links, s.file).unwrap());
        let d2d = ftl(&single_link_plan(&links[0], s.file).unwrap());
        let e_opt = green_report(&s, &opt, 1).unwrap().energy_wh;
        let e_d2d = green_report(&s, &d2d, 1).unwrap().energy_wh;
        prop_assert!(e_opt <= e_d2d);
    }

    #[test]
    fn selections_are_feasible_and_exact_dominates_greedy(s in scenario_strategy()) {
        let exact = select_sources(&s, &AggregateRate);
        let greedy = greedy_select(&s, &AggregateRate);
        match (exact, greedy) {
            (Ok(e), Ok(g)) => {
                let n = s.sink.interfaces.len();
                prop_assert!(e.is_feasible(n));
                prop_assert!(g.is_feasible(n));
                prop_assert!(!e.pairs.is_empty());
                prop_assert!(e.objective_value >= g.objective_value - 1e-9);
                prop_assert!(g.objective_value >= 0.5 * e.objective_value - 1e-9);
            }
            (Err(_), Err(_)) => {}
            (e, g) => prop_assert!(false, "exact {e:?} vs greedy {g:?}"),
        }
    }

    #[test]
    fn faster_newcomer_never_hurts(s in scenario_strategy(), iface in 1u8..=4) {
        let Ok(before) = select_sources(&s, &AggregateRate) else { return Ok(()); };
        let iface = iface.min(s.sink.interfaces.len() as u8);
        let mut more = s.clone();
        more.sources.push(Device::source("ZZ", &[(iface, 15)]));
        let after = select_sources(&more, &AggregateRate).unwrap();
        prop_assert!(after.objective_value >= before.objective_value - 1e-9);
    }

    #[test]
    fn session_never_completes_early(events in prop::collection::vec(0u8..7, 0..60)) {
        let links = [Link::new("D1", 1, 10.0), Link::new("D2", 2, 20.0)];
        let file = FileSpec { packet_count: 6, bits_per_packet: 8 };
        let plan = optimal_split(&links, file).unwrap();
        let assignment = select_sources(
            &Scenario {
                sink: Device::sink("D0", &[1, 2]),
                sources: vec![Device::source("D1", &[(1, 1)]), Device::source("D2", &[(2, 1)])],
                ..Scenario::reference()
            },
            &AggregateRate,
        )
        .unwrap();
        let mut state = SessionState::new();
        for e in events {
            let kind = match e {
                0 => EventKind::StartDiscovery,
                1 => EventKind::SourcesDiscovered,
                2 => EventKind::SourcesSelected(assignment.clone()),
                3 => EventKind::PlanDistributed(plan.clone()),
                4 | 5 => EventKind::PacketReceived,
                _ => EventKind::Aggregated,
            };
            if let Ok(next) = advance_session(state.clone(), kind) {
                state = next;
            }
            prop_assert!(state.received_packets() <= 6);
            if state.phase() == Phase::Complete {
                prop_assert_eq!(state.received_packets(), 6);
            }
            if matches!(state.phase(), Phase::Idle | Phase::Discovery | Phase::Selection) {
                prop_assert!(state.plan().is_none());
            }
        }
    }
}

#[test]
fn random_gain_changes_sign_between_levels_seven_and_eight() {
    let file = FileSpec::default();
    let r2 = DEFAULT_RATES_KBPS[5];
    let gain = |level: usize| {
        let r1 = DEFAULT_RATES_KBPS[level - 1];
        let t_d2d = file.total_bits() as f64 / (r1 * 1000.0);
        relative_gain(expected_random_ftl_two_links(r1, r2, file), t_d2d).unwrap()
    };
    assert!(gain(7) > 0.0, "{}", gain(7));
    assert!(gain(8) < 0.0, "{}", gain(8));
}

#[test]
fn optimal_battery_life_grows_with_level() {
    let s = Scenario::reference();
    let v = VariedLink::first_of(&s).unwrap();
    let levels: Vec<u8> = (1..=15).collect();
    let r = sweep_rate_levels(&s, &v, &levels, &[Scheme::Ds2dOptimal], 0, 0).unwrap();
    let lives: Vec<f64> = r
        .rows
        .iter()
        .map(|row| row.green.battery_life.hours().unwrap())
        .collect();
    assert!(lives.windows(2).all(|w| w[0] <= w[1]), "{lives:?}");
}

#[test]
fn sweeps_are_pure() {
    let s = Scenario::reference();
    let v = VariedLink::first_of(&s).unwrap();
    let levels: Vec<u8> = (1..=15).collect();
    let a = sweep_rate_levels(&s, &v, &levels, &Scheme::ALL, 3000, 99).unwrap();
    let b = sweep_rate_levels(&s, &v, &levels, &Scheme::ALL, 3000, 99).unwrap();
    assert_eq!(a, b);
}

#[test]
fn shares_from_plan_and_rates_agree() {
    let links = [Link::new("D1", 1, 1646.1), Link::new("D2", 2, 1646.1)];
    let plan: SplitPlan = optimal_split(&links, FileSpec::default()).unwrap();
    assert_eq!(plan.first_share(), 0.5);
    assert_eq!(optimal_shares(&links)[0], 0.5);
}

#[test]
fn custom_objective_drives_selection() {
    // Penalize every extra link heavily: a single fastest link wins.
    let s = Scenario::reference();
    let one_link = |sc: &Scenario, pairs: &[ds2d::Pair]| {
        AggregateRate.evaluate(sc, pairs) - 10_000.0 * (pairs.len() as f64 - 1.0)
    };
    let a = select_sources(&s, &one_link).unwrap();
    assert_eq!(a.pairs.len(), 1);
}

#[test]
fn zero_latency_report_is_unbounded() {
    let s = Scenario::reference();
    let r = green_report(&s, &TransferOutcome::from_latency(0.0), 1).unwrap();
    assert_eq!(r.battery_life, BatteryLife::Unbounded);
}
