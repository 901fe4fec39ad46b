use std::cell::{Cell, RefCell};
use std::rc::Rc;

use ucurve::baselines::exhaustive;
use ucurve::cost::*;
use ucurve::lattice::*;
use ucurve::search::*;

fn s(text: &str) -> FeatureSubset {
    text.parse().unwrap()
}

fn oracle_best<C: CostFunction + ?Sized>(cost: &C) -> f64 {
    exhaustive(cost, 1, false).unwrap().best().unwrap().1
}

fn all_subsets(n: usize) -> impl Iterator<Item = FeatureSubset> {
    (0..1u64 << n).map(move |m| FeatureSubset::from_mask(n, m))
}

/// Synthetic instance with costs floored to integers: a monotone transform
/// keeps every chain U-shaped but creates long plateaus.
fn plateau_instance(n: usize, seed: u64) -> TableCost {
    let inst = synth_u_instance(n, seed).unwrap();
    TableCost::from_fn(n, |x| inst.cost(x).floor())
}

fn is_u_decomposable(table: &TableCost) -> bool {
    let c = table.values();
    let full = c.len() - 1;
    (0..=full).all(|b| {
        let mut a = b;
        loop {
            let mut x = b;
            loop {
                if x & a == a && c[a].max(c[b]) < c[x] {
                    return false;
                }
                if x == 0 {
                    break;
                }
                x = (x - 1) & b;
            }
            if a == 0 {
                return true;
            }
            a = (a - 1) & b;
        }
    })
}

fn traced_run<C: CostFunction + ?Sized>(cost: &C, config: SearchConfig) -> (SearchOutcome, Vec<TraceEvent>) {
    let mut events = Vec::new();
    let outcome = UCurveSearch::new(cost, config)
        .unwrap()
        .with_trace(|e: &TraceEvent| events.push(e.clone()))
        .run();
    (outcome, events)
}

#[test]
fn complete_mode_matches_full_search() {
    for seed in 0..120u64 {
        let n = 4 + (seed as usize % 9);
        let cost = synth_u_instance(n, seed).unwrap();
        let policy = match seed % 3 {
            0 => DirectionPolicy::Fixed(0.5),
            1 => DirectionPolicy::Adaptive,
            _ => DirectionPolicy::Fixed((seed % 5) as f64 / 4.0),
        };
        let config = SearchConfig {
            direction_policy: policy,
            ..SearchConfig::with_seed(seed)
        };
        let out = run_ucurve(&cost, config).unwrap();
        assert_eq!(out.completion, Completion::Exhausted);
        assert_eq!(
            out.best().unwrap().1.to_bits(),
            oracle_best(&cost).to_bits(),
            "seed {seed}, n {n}"
        );
    }
}

#[test]
fn each_direction_alone_reaches_the_optimum() {
    for seed in 0..30u64 {
        let cost = synth_u_instance(8, seed).unwrap();
        let want = oracle_best(&cost);
        for p in [0.0, 1.0] {
            let config = SearchConfig {
                direction_policy: DirectionPolicy::Fixed(p),
                ..SearchConfig::with_seed(seed)
            };
            assert_eq!(run_ucurve(&cost, config).unwrap().best().unwrap().1, want, "seed {seed} p {p}");
        }
    }
}

#[test]
fn plateaus_do_not_hide_the_optimum() {
    for seed in 0..80u64 {
        let n = 4 + (seed as usize % 7);
        let table = plateau_instance(n, seed);
        assert!(n > 8 || is_u_decomposable(&table), "seed {seed}");
        let out = run_ucurve(&table, SearchConfig::with_seed(seed)).unwrap();
        assert_eq!(out.best().unwrap().1, oracle_best(&table), "seed {seed}");
    }
    // Cardinality-only profile with flat stretches on both sides.
    let profile = [5.0, 3.0, 3.0, 3.0, 1.0, 1.0, 2.0, 2.0, 4.0];
    let table = TableCost::from_fn(8, |x| profile[x.len()]);
    for seed in 0..20 {
        let out = run_ucurve(&table, SearchConfig::with_seed(seed)).unwrap();
        assert_eq!(out.best().unwrap().1, 1.0);
    }
}

#[test]
fn plateau_walk_keeps_the_cheaper_element_below_it() {
    // A walk ∅ → {0} → {0,1} → {0,1,2} levels off at cost 1. Cutting at
    // {0,1} would also remove {1}, the global minimum.
    let costs = [
        (vec![], 3.0),
        (vec![0], 2.0),
        (vec![1], 0.0),
        (vec![2], 2.0),
        (vec![0, 1], 1.0),
        (vec![0, 2], 1.5),
        (vec![1, 2], 1.0),
        (vec![0, 1, 2], 1.0),
    ];
    let mut table = TableCost::from_fn(3, |_| 0.0);
    for (ix, c) in costs {
        table.set(&FeatureSubset::from_indices(3, ix), c);
    }
    assert!(is_u_decomposable(&table));
    for seed in 0..64 {
        let config = SearchConfig {
            direction_policy: DirectionPolicy::Fixed(1.0),
            ..SearchConfig::with_seed(seed)
        };
        let out = run_ucurve(&table, config).unwrap();
        assert_eq!(out.best().unwrap().1, 0.0, "seed {seed}");
    }
}

#[test]
fn chain_stop_cuts_never_remove_cheaper_elements() {
    let mut checked = 0;
    for seed in 0..100u64 {
        let n = 4 + (seed as usize % 7);
        let table = if seed % 2 == 0 {
            TableCost::tabulate(&synth_u_instance(n, seed).unwrap())
        } else {
            plateau_instance(n, seed)
        };
        let (_, events) = traced_run(&table, SearchConfig::with_seed(seed));
        for e in &events {
            let TraceEvent::Restrict {
                kind,
                subset: anchor,
                origin: RestrictionOrigin::ChainStop,
                ..
            } = e
            else {
                continue;
            };
            let anchor_cost = table.cost(anchor);
            for x in all_subsets(n) {
                let cut = match kind {
                    RestrictionKind::Lower => x.is_subset(anchor),
                    RestrictionKind::Upper => anchor.is_subset(&x),
                };
                if cut {
                    assert!(
                        table.cost(&x) >= anchor_cost,
                        "seed {seed}: {kind} cut at {anchor} removed {x}"
                    );
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn chain_records_are_well_formed() {
    let cost = synth_u_instance(9, 4).unwrap();
    let mut search = UCurveSearch::new(&cost, SearchConfig::with_seed(4)).unwrap();
    let mut records = 0;
    while !search.is_exhausted() {
        let record = match search.select_direction() {
            Direction::DownUp => search.down_up_direction(),
            Direction::UpDown => search.up_down_direction(),
        }
        .unwrap();
        let Some(r) = record else { continue };
        records += 1;
        let m = cost.cost(&r.minimum);
        let below_above = |inner: &FeatureSubset, outer: &FeatureSubset| inner.is_subset(outer) && inner != outer;
        if let Some(a) = &r.previous {
            assert!(cost.cost(a) > m);
            match r.direction {
                Direction::DownUp => assert!(below_above(a, &r.minimum)),
                Direction::UpDown => assert!(below_above(&r.minimum, a)),
            }
        }
        if let Some(b) = &r.stop {
            assert!(cost.cost(b) > m);
            assert_eq!(b.len().abs_diff(r.minimum.len()), 1);
            match r.direction {
                Direction::DownUp => assert!(below_above(&r.minimum, b)),
                Direction::UpDown => assert!(below_above(b, &r.minimum)),
            }
        }
    }
    assert!(records > 0);
}

#[test]
fn every_iteration_grows_the_pruned_region() {
    for seed in 0..20u64 {
        let n = 4 + (seed as usize % 7);
        let cost = synth_u_instance(n, seed).unwrap();
        let mut search = UCurveSearch::new(&cost, SearchConfig::with_seed(seed)).unwrap();
        // The residual space can empty before the certificate fires; the
        // iterations after that still grow the lower coverage.
        let covered = |st: &SearchState| {
            all_subsets(n)
                .map(|x| usize::from(st.lower.covers(&x)) + usize::from(st.upper.covers(&x)))
                .sum::<usize>()
        };
        let mut before = covered(search.state());
        while !search.is_exhausted() {
            search.step().unwrap();
            let after = covered(search.state());
            assert!(after > before, "seed {seed}: {before} -> {after}");
            before = after;
        }
        assert!(search.iterations() <= 1 << n);
    }
}

#[test]
fn popped_elements_are_minimum_exhausted() {
    for seed in 0..20u64 {
        let n = 5 + (seed as usize % 5);
        let table = if seed % 2 == 0 {
            TableCost::tabulate(&synth_u_instance(n, seed).unwrap())
        } else {
            plateau_instance(n, seed)
        };
        let pops = Rc::new(RefCell::new(Vec::new()));
        let sink = Rc::clone(&pops);
        let mut search = UCurveSearch::new(&table, SearchConfig::with_seed(seed))
            .unwrap()
            .with_trace(move |e: &TraceEvent| {
                if let TraceEvent::Pop { subset, .. } = e {
                    sink.borrow_mut().push(subset.clone());
                }
            });
        while !search.is_exhausted() {
            search.step().unwrap();
            let view = search.state().view();
            for e in pops.borrow_mut().drain(..) {
                assert!(!view.contains(&e));
                let ce = table.cost(&e);
                for side in [Adjacency::Lower, Adjacency::Upper] {
                    for adj in view.adjacents(&e, side) {
                        assert!(table.cost(&adj) > ce, "seed {seed}: {e} next to {adj}");
                    }
                }
            }
        }
    }
}

#[test]
fn costs_are_computed_once() {
    for seed in 0..40u64 {
        let n = 4 + (seed as usize % 9);
        let inst = synth_u_instance(n, seed).unwrap();
        let raw = Cell::new(0usize);
        let cost = FnCost::new(n, |x: &FeatureSubset| {
            raw.set(raw.get() + 1);
            inst.cost(x)
        });
        let out = run_ucurve(&cost, SearchConfig::with_seed(seed)).unwrap();
        assert!(out.computed_nodes() <= 1 << n);
        assert_eq!(raw.get(), out.computed_nodes(), "seed {seed}");
    }
}

#[test]
fn identical_seeds_replay_identically() {
    let cost = synth_u_instance(10, 77).unwrap();
    let lines = |seed| {
        let (out, events) = traced_run(&cost, SearchConfig::with_seed(seed));
        let trace: Vec<String> = events.iter().map(ToString::to_string).collect();
        (trace, out.computed_nodes(), out.results.entries().to_vec())
    };
    assert_eq!(lines(5), lines(5));
    assert_ne!(lines(5).0, lines(6).0);
}

#[test]
fn four_feature_example_finds_0111() {
    // U-shaped profile with its minimum at three features; feature 0 carries
    // a small penalty, leaving 0111 as the only cheapest element.
    let cost = SyntheticUInstance::from_parts(vec![9.0, 4.0, 1.0, 0.0, 1.0], vec![0.1, 0.0, 0.0, 0.0]).unwrap();
    let minima: Vec<String> = all_subsets(4)
        .filter(|x| cost.cost(x) == 0.0)
        .map(|x| x.to_string())
        .collect();
    assert_eq!(minima, ["0111"]);
    for seed in 0..16 {
        let out = run_ucurve(&cost, SearchConfig::with_seed(seed)).unwrap();
        assert_eq!(*out.best().unwrap().0, s("0111"));
    }
}

#[test]
fn exhausting_from_010101_pushes_its_two_cheaper_neighbours_first() {
    let m = s("010101");
    let cheaper = [(s("010001"), 4.0), (s("010111"), 3.0)];
    let cost = TableCost::from_fn(6, |x| {
        if *x == m {
            5.0
        } else if let Some((_, c)) = cheaper.iter().find(|(y, _)| y == x) {
            *c
        } else {
            10.0 + x.len() as f64
        }
    });
    let mut pushes = Vec::new();
    let mut search = UCurveSearch::new(&cost, SearchConfig::default())
        .unwrap()
        .with_trace(|e: &TraceEvent| {
            if let TraceEvent::Push { subset, .. } = e {
                pushes.push(subset.to_string());
            }
        });
    search.minimum_exhausting(&m).unwrap();
    drop(search);
    assert_eq!(pushes[..3], ["010101", "010001", "010111"]);
}

#[test]
fn isolated_minimum_is_popped_at_once() {
    let m = s("0110");
    let cost = TableCost::from_fn(4, |x| if *x == m { 0.0 } else { 1.0 + x.len() as f64 });
    let mut search = UCurveSearch::new(&cost, SearchConfig::default()).unwrap();
    search.minimum_exhausting(&m).unwrap();
    let st = search.state();
    assert_eq!(st.lower.elements(), std::slice::from_ref(&m));
    assert_eq!(st.upper.elements(), std::slice::from_ref(&m));
    assert_eq!(st.results.best(), Some((&m, 0.0)));
    assert_eq!(st.minima.total(), 1);
}

/// Six features. Along ∅ ⊂ {0} ⊂ {0,1} ⊂ {0,1,2} ⊂ {0,1,2,3} the cost dips,
/// rises and dips again; {0,1} ⊂ {0,1,3} ⊂ {0,1,2,3} reaches the global
/// minimum {0,1,3} without oscillating.
fn oscillating_table() -> TableCost {
    let special = [
        (FeatureSubset::from_indices(6, [0, 1]), 0.5),
        (FeatureSubset::from_indices(6, [0, 1, 2]), 0.8),
        (FeatureSubset::from_indices(6, [0, 1, 2, 3]), 0.2),
        (FeatureSubset::from_indices(6, [0, 1, 3]), 0.1),
    ];
    TableCost::from_fn(6, |x| {
        if let Some((_, c)) = special.iter().find(|(y, _)| y == x) {
            return *c;
        }
        let k = x.len() as f64;
        2.0 + (k - 3.0).powi(2) + x.iter().map(|i| 0.01 * (i + 1) as f64).sum::<f64>()
    })
}

#[test]
fn oscillating_chain_fixture_is_recovered() {
    let table = oscillating_table();
    assert!(!is_u_decomposable(&table));
    let chain: Vec<f64> = [vec![], vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]]
        .into_iter()
        .map(|ix| table.cost(&FeatureSubset::from_indices(6, ix)))
        .collect();
    assert!(!is_u_shaped(&chain));
    let full = exhaustive(&table, 1, false).unwrap();
    let target = FeatureSubset::from_indices(6, [0, 1, 3]);
    assert_eq!(full.best(), Some((&target, 0.1)));
    for seed in 0..50 {
        let out = run_ucurve(&table, SearchConfig::with_seed(seed)).unwrap();
        assert_eq!(out.best(), Some((&target, 0.1)), "seed {seed}");
    }
}

#[test]
fn budget_and_target_halt_the_run() {
    let cost = synth_u_instance(12, 9).unwrap();
    let config = SearchConfig {
        max_evaluations: Some(40),
        ..SearchConfig::with_seed(1)
    };
    let out = run_ucurve(&cost, config).unwrap();
    assert_eq!(out.completion, Completion::BudgetReached);
    assert_eq!(out.computed_nodes(), 40);

    let best = oracle_best(&cost);
    let config = SearchConfig {
        stop_target: Some(StopTarget::at_or_below(best)),
        ..SearchConfig::with_seed(1)
    };
    let out = run_ucurve(&cost, config).unwrap();
    assert_eq!(out.completion, Completion::TargetReached);
    assert_eq!(out.best().unwrap().1, best);
    let config = SearchConfig {
        stop_target: Some(StopTarget::below(best)),
        ..SearchConfig::with_seed(1)
    };
    assert_eq!(run_ucurve(&cost, config).unwrap().completion, Completion::Exhausted);
}

#[test]
fn trial_limit_still_terminates() {
    for seed in 0..10 {
        let cost = synth_u_instance(10, seed).unwrap();
        let config = SearchConfig {
            exhaust_trial_limit: Some(2),
            ..SearchConfig::with_seed(seed)
        };
        let out = run_ucurve(&cost, config).unwrap();
        assert_eq!(out.completion, Completion::Exhausted);
        assert!(out.best().unwrap().1 >= oracle_best(&cost));
    }
}

#[test]
fn result_list_holds_the_cheapest_elements() {
    let cost = SyntheticUInstance::symmetric(5, 2);
    let config = SearchConfig {
        result_capacity: 10,
        ..SearchConfig::with_seed(3)
    };
    let out = run_ucurve(&cost, config).unwrap();
    let entries = out.results.entries();
    assert_eq!(entries.len(), 10);
    assert!(entries.iter().all(|(x, c)| x.len() == 2 && *c == 0.0));
}
