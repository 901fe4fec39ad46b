use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ucurve::baselines::{exhaustive, sffs, SffsConfig, EXHAUSTIVE_GUARD};
use ucurve::cost::{synth_u_instance, CostFunction, TableCost};
use ucurve::lattice::{
    in_lower_space, in_upper_space, maximal_element, minimal_element, LowerRestrictions, RestrictionKind,
    UpperRestrictions,
};
use ucurve::search::{
    DirectionPolicy, RestrictionOrigin, SearchConfig, SearchOutcome, StopTarget, TraceEvent, UCurveSearch,
};
use ucurve::FeatureSubset;

use crate::args::{Algo, CompareArgs, Mode, RunArgs, SearchArgs, SelftestArgs};
use crate::problem::{load_problems, Instance};
use crate::report::{CompareRow, MeanRow, RunOutput, RunReport, Winner};
use crate::CliError;

fn direction_label(p: DirectionPolicy) -> String {
    match p {
        DirectionPolicy::Fixed(p) => format!("p={p}"),
        DirectionPolicy::Adaptive => "adaptive".into(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

fn search_config(s: &SearchArgs, seed: u64, capacity: usize, target: Option<StopTarget>) -> SearchConfig {
    SearchConfig {
        seed,
        result_capacity: capacity,
        direction_policy: s.direction,
        max_evaluations: s.budget,
        exhaust_trial_limit: s.trial_limit,
        stop_target: target,
    }
}

fn run_search<C: CostFunction + ?Sized>(
    cost: &C,
    config: SearchConfig,
    trace: Option<&mut Vec<String>>,
) -> Result<SearchOutcome, CliError> {
    let search = UCurveSearch::new(cost, config).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(match trace {
        Some(lines) => search.with_trace(|e| lines.push(e.to_string())).run(),
        None => search.run(),
    })
}

fn best_of(best: Option<(&FeatureSubset, f64)>) -> (String, f64) {
    best.map_or((String::new(), f64::NAN), |(s, c)| (s.to_string(), c))
}

fn run_one(
    args: &RunArgs,
    inst: &Instance,
    seed: u64,
    trace: Option<&mut Vec<String>>,
) -> Result<RunReport, CliError> {
    let s = &args.search;
    let capacity = args.result_capacity as usize;
    let start = Instant::now();
    let (algorithm, best, nodes, completion, config) = match args.algo {
        Algo::Ucurve => {
            let target = args.target.map(StopTarget::below);
            let out = run_search(&inst.cost, search_config(s, seed, capacity, target), trace)?;
            let mode = if args.mode == Mode::Uc { "uc" } else { "ucc" };
            let config = format!(
                "mode={mode};direction={};capacity={capacity};budget={};target={};trial_limit={}",
                direction_label(s.direction),
                opt(s.budget),
                opt(args.target),
                opt(s.trial_limit)
            );
            (
                format!("ucurve_{mode}"),
                best_of(out.best()),
                out.computed_nodes(),
                out.completion.to_string(),
                config,
            )
        }
        Algo::Sffs => {
            let out = sffs(&inst.cost, &sffs_config(s, capacity));
            let config = format!("delta={};target_dim={};capacity={capacity}", s.delta, opt(s.target_dim));
            ("sffs".into(), best_of(out.best()), out.computed_nodes(), "complete".into(), config)
        }
        Algo::Exhaustive => {
            let out = exhaustive(&inst.cost, capacity, args.allow_large)
                .map_err(|e| CliError::Usage(format!("{e} (--allow-large)")))?;
            let config = format!("capacity={capacity}");
            ("exhaustive".into(), best_of(out.best()), out.computed_nodes(), "exhausted".into(), config)
        }
    };
    let wall = start.elapsed().as_secs_f64();
    let preprocess: Vec<String> = args.problem.preprocess.iter().map(|p| p.to_string()).collect();
    let config = if preprocess.is_empty() {
        config
    } else {
        format!("{config};preprocess={}", preprocess.join("+"))
    };
    Ok(RunReport {
        algorithm,
        dataset: inst.id.clone(),
        seed,
        best_subset: best.0,
        best_cost: best.1,
        computed_nodes: nodes,
        wall_time_seconds: wall,
        completion,
        config,
    })
}

fn sffs_config(s: &SearchArgs, capacity: usize) -> SffsConfig {
    SffsConfig {
        delta: s.delta,
        target_dim: s.target_dim,
        result_capacity: capacity,
    }
}

/// `run`: one report per repeat (seeds `seed..seed + repeats`) and dataset.
pub fn cmd_run(args: &RunArgs) -> Result<RunOutput, CliError> {
    let s = &args.search;
    if args.algo == Algo::Ucurve {
        match args.mode {
            Mode::Uc if s.budget.is_none() && args.target.is_none() => {
                return Err(CliError::Usage("--mode uc needs --budget or --target".into()));
            }
            Mode::Ucc if s.budget.is_some() || args.target.is_some() => {
                return Err(CliError::Usage("--budget and --target need --mode uc".into()));
            }
            _ => {}
        }
    }
    let problems = load_problems(&args.problem, s.seed)?;
    let mut out = RunOutput::default();
    let mut trace_text = String::new();
    for inst in &problems {
        let runs: Vec<(RunReport, Vec<String>)> = (0..s.repeats)
            .into_par_iter()
            .map(|r| {
                let mut lines = Vec::new();
                let want = args.trace.is_some() && args.algo == Algo::Ucurve;
                let report = run_one(args, inst, s.seed + r, want.then_some(&mut lines))?;
                Ok((report, lines))
            })
            .collect::<Result<_, CliError>>()?;
        let first = out.reports.len();
        for (report, lines) in runs {
            if args.trace.is_some() {
                let _ = writeln!(trace_text, "# dataset={} seed={}", report.dataset, report.seed);
                for l in lines {
                    trace_text.push_str(&l);
                    trace_text.push('\n');
                }
            }
            out.reports.push(report);
        }
        if s.repeats > 1 {
            out.means.extend(MeanRow::of(&out.reports[first..]));
        }
    }
    if let Some(path) = &args.trace {
        std::fs::write(path, trace_text)?;
    }
    Ok(out)
}

struct Timed {
    best: f64,
    nodes: usize,
    seconds: f64,
}

fn timed_search(inst: &Instance, config: SearchConfig) -> Result<Timed, CliError> {
    let start = Instant::now();
    let out = run_search(&inst.cost, config, None)?;
    Ok(Timed {
        best: best_of(out.best()).1,
        nodes: out.computed_nodes(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, k) = xs.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    sum / k as f64
}

/// `compare`: SFFS once, then per repeat an optional UCC run and a UC run
/// that stops as soon as it beats SFFS (or matches it, when UCC proved the
/// SFFS result optimal).
pub fn cmd_compare(args: &CompareArgs) -> Result<Vec<CompareRow>, CliError> {
    let s = &args.search;
    let problems = load_problems(&args.problem, s.seed)?;
    let mut rows = Vec::with_capacity(problems.len());
    for inst in &problems {
        let n = inst.cost.degree();
        let start = Instant::now();
        let baseline = sffs(&inst.cost, &sffs_config(s, 1));
        let time_sffs = start.elapsed().as_secs_f64();
        let best_sffs = best_of(baseline.best()).1;
        let with_ucc = args.mode != Some(Mode::Uc) && (n <= EXHAUSTIVE_GUARD || args.force);

        let runs: Vec<(Option<Timed>, Timed)> = (0..s.repeats)
            .into_par_iter()
            .map(|r| {
                let seed = s.seed + r;
                let ucc = if with_ucc {
                    let cfg = SearchConfig {
                        max_evaluations: None,
                        ..search_config(s, seed, 1, None)
                    };
                    Some(timed_search(inst, cfg)?)
                } else {
                    None
                };
                let target = match &ucc {
                    Some(u) if u.best == best_sffs => StopTarget::at_or_below(best_sffs),
                    _ => StopTarget::below(best_sffs),
                };
                let uc = timed_search(inst, search_config(s, seed, 1, Some(target)))?;
                Ok((ucc, uc))
            })
            .collect::<Result<_, CliError>>()?;

        let winner = if runs.iter().any(|(_, uc)| uc.best > best_sffs) {
            Winner::Sffs
        } else if runs.iter().all(|(_, uc)| uc.best < best_sffs) {
            Winner::Uc
        } else {
            Winner::Equal
        };
        let ucc_mean = |f: fn(&Timed) -> f64| with_ucc.then(|| mean(runs.iter().filter_map(|(u, _)| u.as_ref().map(f))));
        rows.push(CompareRow {
            test: format!("{} ({n})", inst.id),
            winner,
            nodes_sffs: baseline.computed_nodes() as f64,
            nodes_uc: mean(runs.iter().map(|(_, uc)| uc.nodes as f64)),
            nodes_ucc: ucc_mean(|t| t.nodes as f64),
            time_sffs,
            time_uc: mean(runs.iter().map(|(_, uc)| uc.seconds)),
            time_ucc: ucc_mean(|t| t.seconds),
            best_sffs,
            best_uc: mean(runs.iter().map(|(_, uc)| uc.best)),
            best_ucc: ucc_mean(|t| t.best),
            runs: runs.len(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub unit: &'static str,
    pub passed: usize,
    pub total: usize,
    /// First failure, rendered for a human.
    pub counterexample: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str, unit: &'static str) -> Self {
        Self {
            name,
            unit,
            passed: 0,
            total: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, failure: Option<String>) {
        self.total += 1;
        match failure {
            None => self.passed += 1,
            Some(dump) => {
                self.counterexample.get_or_insert(dump);
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = writeln!(out, "{}: {}/{} {}", s.name, s.passed, s.total, s.unit);
        }
        for s in &self.suites {
            if let Some(dump) = &s.counterexample {
                let _ = writeln!(out, "counterexample ({}):\n{dump}", s.name);
            }
        }
        let _ = writeln!(out, "selftest: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

const POLICIES: [DirectionPolicy; 4] = [
    DirectionPolicy::Fixed(0.5),
    DirectionPolicy::Adaptive,
    DirectionPolicy::Fixed(1.0),
    DirectionPolicy::Fixed(0.0),
];

fn restriction_dump(out: &SearchOutcome) -> String {
    format!(
        "lower restrictions:\n{}upper restrictions:\n{}",
        out.lower.to_lines(),
        out.upper.to_lines()
    )
}

fn oracle_suite(max_n: usize, trials: usize, seed: u64) -> Result<SuiteResult, CliError> {
    let mut suite = SuiteResult::new("oracle equivalence", "oracle matches");
    for i in 0..trials {
        let n = 4 + i % (max_n - 3);
        let s = seed.wrapping_add(i as u64);
        let inst = synth_u_instance(n, s).map_err(|e| CliError::Usage(e.to_string()))?;
        let full = exhaustive(&inst, 1, false).map_err(|e| CliError::Usage(e.to_string()))?;
        let policy = POLICIES[i % POLICIES.len()];
        let config = SearchConfig {
            direction_policy: policy,
            ..SearchConfig::with_seed(s)
        };
        let out = run_search(&inst, config, None)?;
        let (want_set, want) = best_of(full.best());
        let (got_set, got) = best_of(out.best());
        let failure = (want.to_bits() != got.to_bits()).then(|| {
            format!(
                "n={n} instance_seed={s} search_seed={s} direction={}\nexpected {want_set} cost {want}\nfound {got_set} cost {got}\n{}",
                direction_label(policy),
                restriction_dump(&out)
            )
        });
        suite.record(failure);
    }
    Ok(suite)
}

fn mask_lines(n: usize, masks: &[u64]) -> String {
    masks.iter().map(|&m| format!("{}\n", FeatureSubset::from_mask(n, m))).collect()
}

/// Membership, minimality and maximality against bit-mask definitions.
fn membership_case(n: usize, case_seed: u64) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let full = (1u64 << n) - 1;
    let rs: Vec<u64> = (0..rng.gen_range(0..24)).map(|_| rng.gen::<u64>() & full).collect();
    let a = rng.gen::<u64>() & full;
    let lower = LowerRestrictions::from_elements(n, rs.iter().map(|&r| FeatureSubset::from_mask(n, r)));
    let upper = UpperRestrictions::from_elements(n, rs.iter().map(|&r| FeatureSubset::from_mask(n, r)));
    let in_lower = |x: u64| rs.iter().all(|&r| x & !r != 0);
    let in_upper = |x: u64| rs.iter().all(|&r| r & !x != 0);
    let a_set = FeatureSubset::from_mask(n, a);

    let mut problems = Vec::new();
    if in_lower_space(&a_set, &lower).ok() != Some(in_lower(a)) {
        problems.push(format!("lower membership of {a_set} is wrong"));
    }
    if in_upper_space(&a_set, &upper).ok() != Some(in_upper(a)) {
        problems.push(format!("upper membership of {a_set} is wrong"));
    }
    let min = minimal_element(&lower, &mut rng);
    let m = min.to_mask().unwrap_or(0);
    let min_ok = if in_lower(full) {
        in_lower(m) && (0..n).all(|i| m >> i & 1 == 0 || !in_lower(m & !(1 << i)))
    } else {
        m == full
    };
    if !min_ok {
        problems.push(format!("minimal element {min} is not minimal"));
    }
    let max = maximal_element(&upper, &mut rng);
    let m = max.to_mask().unwrap_or(0);
    let max_ok = if in_upper(0) {
        in_upper(m) && (0..n).all(|i| m >> i & 1 == 1 || !in_upper(m | 1 << i))
    } else {
        m == 0
    };
    if !max_ok {
        problems.push(format!("maximal element {max} is not maximal"));
    }
    let dual: UpperRestrictions = lower.complemented();
    if lower.covers(&a_set) != dual.covers(&a_set.complement()) {
        problems.push(format!("complement duality fails at {a_set}"));
    }
    (!problems.is_empty()).then(|| {
        format!(
            "n={n} case_seed={case_seed} A={a_set}\n{}\nrestrictions:\n{}",
            problems.join("\n"),
            mask_lines(n, &rs)
        )
    })
}

/// Every chain-stop cut must leave nothing cheaper than its anchor behind.
fn soundness_case(n: usize, seed: u64) -> Result<Option<String>, CliError> {
    let inst = synth_u_instance(n, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    // Odd seeds floor the costs, which creates plateaus along chains.
    let table = if seed.is_multiple_of(2) {
        TableCost::tabulate(&inst)
    } else {
        TableCost::from_fn(n, |x| inst.cost(x).floor())
    };
    let mut lines = Vec::new();
    let mut events = Vec::new();
    let search = UCurveSearch::new(&table, SearchConfig::with_seed(seed)).map_err(|e| CliError::Usage(e.to_string()))?;
    let out = search
        .with_trace(|e| {
            lines.push(e.to_string());
            events.push(e.clone());
        })
        .run();
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
        for mask in 0..1u64 << n {
            let x = FeatureSubset::from_mask(n, mask);
            let cut = match kind {
                RestrictionKind::Lower => x.is_subset(anchor),
                RestrictionKind::Upper => anchor.is_subset(&x),
            };
            if cut && table.cost(&x) < anchor_cost {
                return Ok(Some(format!(
                    "n={n} seed={seed} plateaus={}\n{kind} cut at {anchor} (cost {anchor_cost}) removed {x} (cost {})\n{}trace:\n{}",
                    seed % 2 == 1,
                    table.cost(&x),
                    restriction_dump(&out),
                    lines.join("\n")
                )));
            }
        }
    }
    Ok(None)
}

/// `selftest`: search against full enumeration, restriction-set queries
/// against their definitions, and chain-stop soundness.
pub fn cmd_selftest(args: &SelftestArgs) -> Result<SelftestReport, CliError> {
    let max_n = args.n as usize;
    let trials = args.trials as usize;
    let mut suites = vec![oracle_suite(max_n, trials, args.seed)?];

    let mut membership = SuiteResult::new("membership and minimality", "cases hold");
    let lattice_n = max_n.min(12);
    for i in 0..trials {
        membership.record(membership_case(1 + i % lattice_n, args.seed.wrapping_add(i as u64)));
    }
    suites.push(membership);

    let mut soundness = SuiteResult::new("chain-stop soundness", "instances sound");
    let sound_n = max_n.min(10);
    for i in 0..trials.min(100) {
        soundness.record(soundness_case(4 + i % (sound_n - 3), args.seed.wrapping_add(i as u64))?);
    }
    suites.push(soundness);
    Ok(SelftestReport { suites })
}
