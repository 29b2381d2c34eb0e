//! Whole-toolkit acceptance suite. Each numbered criterion prints exactly
//! one pass/fail line (run with `--nocapture` to watch them); the test
//! fails if any criterion fails, after all lines have printed.
//!
//! The criteria are property-based (sensitivity oracles, dominance, balance
//! invariants) plus directional reproductions on the bundled fixtures;
//! absolute headline numbers depend on large confidential datasets and are
//! out of scope at desk scale.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use netboost::planning::{ModelKind, PlanResult, ScenarioConfig};
use netboost::scenario::{compare_plans, load_study_network};
use netboost::sensitivity::{dc_flow, dc_flow_without_line, find_bridges, post_outage_flow};
use netboost::snapshots::{reduce_snapshots, FeatureMatrix};
use netboost::synthetic::{random_balanced_injections, random_connected};
use netboost::{load_network, reduce_series_dir, solve_plan, verify_plan, Network, SensitivitySet};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn triangle_cfg() -> ScenarioConfig {
    ScenarioConfig { co2_cap: Some(400_000.0), ..ScenarioConfig::default() }
}

fn two_zone_cfg() -> ScenarioConfig {
    ScenarioConfig {
        co2_baseline: Some(1_160_000.0),
        co2_reduction: Some(0.6),
        ..ScenarioConfig::default()
    }
}

/// A plan emitted by one of the solution criteria, queued for the audit
/// criterion.
struct Emitted {
    label: String,
    fixture: &'static str,
    cfg: ScenarioConfig,
    plan: PlanResult,
}

type Registry = Mutex<Vec<Emitted>>;

fn solve_on(fixture_name: &'static str, cfg: &ScenarioConfig) -> netboost::planning::SolvedPlan {
    let net = load_study_network(fixture(fixture_name)).expect("fixture loads");
    solve_plan(&net, cfg).unwrap_or_else(|e| panic!("{fixture_name} must solve: {e}"))
}

fn emit(reg: &Registry, label: impl Into<String>, fixture: &'static str, cfg: &ScenarioConfig, plan: &PlanResult) {
    reg.lock().unwrap().push(Emitted {
        label: label.into(),
        fixture,
        cfg: cfg.clone(),
        plan: plan.clone(),
    });
}

struct Tally {
    failures: Vec<String>,
}

impl Tally {
    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<String, String>) {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS  ({detail}; {secs:.1} s)"),
            Err(why) => {
                println!("criterion {name}: FAIL  ({why}; {secs:.1} s)");
                self.failures.push(name.to_string());
            }
        }
    }
}

#[test]
fn acceptance_criteria() {
    let suite_start = Instant::now();
    let mut tally = Tally { failures: Vec::new() };
    let registry: Registry = Mutex::new(Vec::new());

    // 1. Redistribution-factor flows must equal brute-force topology
    //    re-solves on a broad random population, fast.
    tally.run("01 outage-redistribution-oracle", || {
        let t = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        let mut pairs = 0usize;
        for trial in 0..200 {
            let n_buses = 5 + (trial % 16);
            let net = random_connected(n_buses, 2 + trial % 4, &mut rng);
            let sens = SensitivitySet::compute(&net, &net.buses[0].id).map_err(|e| e.to_string())?;
            let inj = random_balanced_injections(net.n_buses(), &mut rng);
            let base = dc_flow(&net, &inj).map_err(|e| e.to_string())?;
            for k in 0..net.n_lines() {
                if sens.bridges.contains(&net.lines[k].id) {
                    continue;
                }
                let fast = post_outage_flow(&base, &sens, k, &net).map_err(|e| e.to_string())?;
                let slow = dc_flow_without_line(&net, &inj, k).map_err(|e| e.to_string())?;
                for l in 0..net.n_lines() {
                    if l != k {
                        worst = worst.max((fast[l] - slow[l]).abs());
                    }
                }
                pairs += 1;
            }
        }
        let secs = t.elapsed().as_secs_f64();
        if worst > 1e-8 {
            return Err(format!("worst oracle gap {worst:.3e} MW exceeds 1e-8"));
        }
        if secs > 60.0 {
            return Err(format!("took {secs:.1} s, budget is 60 s"));
        }
        Ok(format!("200 networks, {pairs} outage pairs, worst gap {worst:.1e} MW"))
    });

    // 2. Redistribution diagonal convention and bridge handling: the
    //    self-column is exactly -1, and numerically flagged islanding
    //    columns coincide with graph-theoretic bridges.
    tally.run("02 redistribution-diagonal-and-bridges", || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut with_bridges = 0usize;
        for trial in 0..200 {
            let n_buses = 5 + (trial % 16);
            // extra_lines 0 gives a tree (every line a bridge).
            let net = random_connected(n_buses, trial % 4, &mut rng);
            let sens = SensitivitySet::compute(&net, &net.buses[0].id).map_err(|e| e.to_string())?;
            let graph = find_bridges(&net);
            for l in 0..net.n_lines() {
                // Bridge columns are flagged unusable (NaN), not -1.
                if graph.contains(&net.lines[l].id) {
                    continue;
                }
                if sens.lodf[(l, l)] != -1.0 {
                    return Err(format!("diagonal entry {} is {}", net.lines[l].id, sens.lodf[(l, l)]));
                }
            }
            if graph != sens.bridges {
                return Err(format!("bridge sets differ: graph {graph:?} vs numeric {:?}", sens.bridges));
            }
            if !graph.is_empty() {
                with_bridges += 1;
            }
        }
        Ok(format!("200 networks, {with_bridges} of them with bridges, diagonals exact"))
    });

    // 3. Dominance: the co-optimized model is a superset of the other two,
    //    so it can never cost more (up to solver tolerance) on any fixture.
    tally.run("03 strategy-dominance", || {
        let mut details = Vec::new();
        for (name, cfg) in [("triangle", triangle_cfg()), ("two_zone", two_zone_cfg())] {
            let net = load_study_network(fixture(name)).map_err(|e| e.to_string())?;
            let cmp = compare_plans(&net, &cfg).map_err(|e| e.to_string())?;
            let prev = cmp.total(ModelKind::Preventive);
            let seq = cmp.total(ModelKind::Sequential);
            let sim = cmp.total(ModelKind::Simultaneous);
            let slack = 1e-6 * prev.abs();
            if sim > prev + slack {
                return Err(format!("{name}: simultaneous {sim} exceeds preventive {prev}"));
            }
            if sim > seq + 1e-6 * seq.abs() {
                return Err(format!("{name}: simultaneous {sim} exceeds sequential {seq}"));
            }
            // Solve the three models again through the public entry point so
            // the audit criterion sees exactly what a user would get.
            for model in [ModelKind::Preventive, ModelKind::Sequential, ModelKind::Simultaneous] {
                let mut c = cfg.clone();
                c.model = model;
                if model == ModelKind::Preventive {
                    c.tatl_factor = 1.0;
                }
                let solved = solve_on(name, &c);
                emit(&registry, format!("dominance {model} on {name}"), name, &c, &solved.plan);
            }
            details.push(format!("{name}: sim {sim:.0} <= min(prev {prev:.0}, seq {seq:.0})"));
        }
        Ok(details.join("; "))
    });

    // 4. With no temporary-overload headroom and positive booster prices,
    //    the co-optimized model must not buy any boosters.
    tally.run("04 no-headroom-means-no-boosters", || {
        let mut worst: f64 = 0.0;
        for (name, mut cfg) in [("triangle", triangle_cfg()), ("two_zone", two_zone_cfg())] {
            cfg.model = ModelKind::Simultaneous;
            cfg.tatl_factor = 1.0;
            let solved = solve_on(name, &cfg);
            let (up, dn) = solved.plan.total_nb_capacity();
            worst = worst.max(up + dn);
            emit(&registry, format!("strict co-optimized on {name}"), name, &cfg, &solved.plan);
        }
        if worst > 1e-6 {
            return Err(format!("booster capacity {worst:.3e} MW bought with nothing to correct"));
        }
        Ok(format!("max total booster capacity {worst:.1e} MW"))
    });

    // 5. Raising the temporary rating only relaxes constraints, so the
    //    investment-model objective is non-increasing along the factor.
    tally.run("05 overload-factor-monotonicity", || {
        let factors = [1.0, 1.1, 1.2, 1.3, 1.5];
        let mut details = Vec::new();
        for (name, base) in [("triangle", triangle_cfg()), ("two_zone", two_zone_cfg())] {
            let mut previous = f64::INFINITY;
            let mut first = 0.0;
            let mut last = 0.0;
            for &f in &factors {
                let mut cfg = base.clone();
                cfg.model = ModelKind::Preventive;
                cfg.tatl_factor = f;
                let solved = solve_on(name, &cfg);
                let obj = solved.objective();
                if obj > previous + 1e-6 * previous.abs().max(1.0) {
                    return Err(format!("{name}: objective rose from {previous} to {obj} at factor {f}"));
                }
                emit(&registry, format!("relaxed investment f={f} on {name}"), name, &cfg, &solved.plan);
                if f == factors[0] {
                    first = obj;
                }
                previous = obj;
                last = obj;
            }
            details.push(format!("{name}: {first:.0} -> {last:.0}"));
        }
        Ok(details.join("; "))
    });

    // 6. Tightening the emission cap pushes more remote wind through the
    //    congested corridor, so booster capacity must not shrink.
    tally.run("06 emission-cap-directionality", || {
        let reductions = [0.6, 0.7, 0.8];
        let mut previous = -f64::INFINITY;
        let mut sizes = Vec::new();
        for &r in &reductions {
            let mut cfg = two_zone_cfg();
            cfg.co2_reduction = Some(r);
            let solved = solve_on("two_zone", &cfg);
            let (up, dn) = solved.plan.total_nb_capacity();
            let total = up + dn;
            if total < previous - 1e-6 {
                return Err(format!("booster capacity fell from {previous} to {total} at reduction {r}"));
            }
            emit(&registry, format!("emission reduction {r}"), "two_zone", &cfg, &solved.plan);
            sizes.push(format!("{total:.2}"));
            previous = total;
        }
        Ok(format!("total booster MW over tightening caps: {}", sizes.join(" -> ")))
    });

    // 7. Single-outage ring where the booster pair is hand-computable: the
    //    relaxed schedule overloads one line by exactly 20 MW after the
    //    outage, only one bus has a unit redistribution coefficient, so the
    //    optimum is a 20 MW pair priced at 46000*20 capital + 0.02*20
    //    dispatch.
    tally.run("07 hand-solved-booster-pair", || {
        let mut cfg = triangle_cfg();
        cfg.model = ModelKind::Sequential;
        cfg.contingencies = Some(vec!["AC".into()]);
        let solved = solve_on("triangle", &cfg);
        let net = load_network(fixture("triangle")).map_err(|e| e.to_string())?;
        let plan = &solved.plan;
        let a = net.bus_index("A").unwrap();
        let dn_a = plan.nb_capacity_down[a];
        let (up, dn) = plan.total_nb_capacity();
        if (dn_a - 20.0).abs() > 1e-6 {
            return Err(format!("absorbing booster at A is {dn_a} MW, expected 20"));
        }
        if (up - 20.0).abs() > 1e-6 || (dn - 20.0).abs() > 1e-6 {
            return Err(format!("totals {up}/{dn} MW, expected 20/20"));
        }
        let stage2 = solved.stages.last().unwrap().solution.objective;
        let expected = 46_000.0 * 20.0 + 0.02 * 20.0;
        if ((stage2 - expected) / expected).abs() > 1e-6 {
            return Err(format!("placement objective {stage2}, expected {expected}"));
        }
        emit(&registry, "hand-solved single outage", "triangle", &cfg, plan);
        Ok(format!("20 MW pair at {expected} EUR/a matched to 1e-6"))
    });

    // 8. Independent audit: every plan the earlier criteria produced passes
    //    the from-scratch constraint check; a deliberately corrupted plan
    //    fails the exact named check.
    tally.run("08 independent-plan-audit", || {
        let emitted = registry.lock().unwrap();
        if emitted.len() < 20 {
            return Err(format!("only {} plans registered", emitted.len()));
        }
        let mut nets: BTreeMap<&'static str, Network> = BTreeMap::new();
        for e in emitted.iter() {
            let net = match nets.get(e.fixture) {
                Some(n) => n,
                None => {
                    let n = load_study_network(fixture(e.fixture)).map_err(|x| x.to_string())?;
                    nets.insert(e.fixture, n);
                    nets.get(e.fixture).unwrap()
                }
            };
            let report = verify_plan(&e.plan, net, &e.cfg).map_err(|x| x.to_string())?;
            if !report.valid() {
                return Err(format!("plan '{}' failed audit:\n{}", e.label, report.render()));
            }
            for c in &report.checks {
                if c.max_violation > 1e-6 {
                    return Err(format!(
                        "plan '{}': {} violation {:.3e} above 1e-6",
                        e.label, c.name, c.max_violation
                    ));
                }
            }
        }
        // Corrupt one verified plan: push a flow 10% past its rating.
        let victim = &emitted[0];
        let net = &nets[victim.fixture];
        let mut bad = victim.plan.clone();
        bad.line_flow[0][0] = net.lines[0].patl * 1.1;
        let report = verify_plan(&bad, net, &victim.cfg).map_err(|x| x.to_string())?;
        let rating_check = report.check("patl_base").ok_or("patl_base check missing")?;
        if report.valid() || rating_check.pass {
            return Err("corrupted plan passed the audit".into());
        }
        Ok(format!("{} plans audited clean, corruption caught by patl_base", emitted.len()))
    });

    // 9. Booster actions are a zero-sum transfer and never push and absorb
    //    at the same bus in the same situation at a vertex optimum.
    tally.run("09 booster-balance-and-exclusivity", || {
        let emitted = registry.lock().unwrap();
        let mut worst_residual: f64 = 0.0;
        let mut worst_overlap: f64 = 0.0;
        let mut situations = 0usize;
        for e in emitted.iter() {
            if !e.plan.has_boosters() {
                continue;
            }
            for (t, per_outage) in e.plan.nb_dispatch_up.iter().enumerate() {
                for (k, ups) in per_outage.iter().enumerate() {
                    let dns = &e.plan.nb_dispatch_down[t][k];
                    let residual: f64 =
                        ups.iter().sum::<f64>() - dns.iter().sum::<f64>();
                    worst_residual = worst_residual.max(residual.abs());
                    for (u, d) in ups.iter().zip(dns) {
                        worst_overlap = worst_overlap.max(u.min(*d));
                    }
                    situations += 1;
                }
            }
        }
        if situations == 0 {
            return Err("no booster dispatch to check".into());
        }
        if worst_residual > 1e-8 {
            return Err(format!("balance residual {worst_residual:.3e} above 1e-8"));
        }
        if worst_overlap > 1e-6 {
            return Err(format!("simultaneous up+down of {worst_overlap:.3e} MW at one bus"));
        }
        Ok(format!(
            "{situations} outage situations: residual {worst_residual:.1e}, overlap {worst_overlap:.1e}"
        ))
    });

    // 10. Typical-hour selection: weights conserve the period bit-exactly,
    //     a planted two-day-type year is recovered, and a fixed seed gives
    //     byte-identical reduced files.
    tally.run("10 typical-hour-selection", || {
        let src = fixture("two_daytypes");
        let net = load_study_network(&src).map_err(|e| e.to_string())?;
        let features = FeatureMatrix::from_network(&net);
        let red = reduce_snapshots(&features, 2, 0).map_err(|e| e.to_string())?;
        let sum: f64 = red.weights.iter().sum();
        if sum != net.period_hours {
            return Err(format!("weights sum to {sum}, period is {}", net.period_hours));
        }
        if red.weights != vec![48.0, 48.0] {
            return Err(format!("expected 48/48 h day types, got {:?}", red.weights));
        }
        let day_type = |t: usize| (t / 24) % 2;
        for (t, &cluster) in red.assignment.iter().enumerate() {
            if day_type(red.representatives[cluster]) != day_type(t) {
                return Err(format!("hour {t} assigned across day types"));
            }
        }
        // Same seed twice: every written byte identical.
        let out_a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out_b = tempfile::tempdir().map_err(|e| e.to_string())?;
        reduce_series_dir(&src, out_a.path(), 2, 7).map_err(|e| e.to_string())?;
        reduce_series_dir(&src, out_b.path(), 2, 7).map_err(|e| e.to_string())?;
        for f in ["buses.csv", "lines.csv", "generators.csv", "snapshots.csv", "loads.csv", "availability.csv"] {
            let a = std::fs::read(out_a.path().join(f)).map_err(|e| e.to_string())?;
            let b = std::fs::read(out_b.path().join(f)).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{f} differs between identical-seed runs"));
            }
        }
        // Weight exactness on an uneven clustering too.
        let tz = load_study_network(fixture("two_zone")).map_err(|e| e.to_string())?;
        let tzf = FeatureMatrix::from_network(&tz);
        for k in 1..=4 {
            let r = reduce_snapshots(&tzf, k, 3).map_err(|e| e.to_string())?;
            let s: f64 = r.weights.iter().sum();
            if s != tz.period_hours {
                return Err(format!("k={k}: weights sum {s} != {}", tz.period_hours));
            }
        }
        Ok("day types recovered 48/48 h, seeded runs byte-identical, weights exact".into())
    });

    // 11. The whole suite must stay fast enough to run on every change.
    let total = suite_start.elapsed().as_secs_f64();
    tally.run("11 suite-runtime", || {
        if total > 600.0 {
            return Err(format!("suite took {total:.0} s, budget 600 s"));
        }
        Ok(format!("criteria 1-10 in {total:.1} s of a 600 s budget"))
    });

    assert!(
        tally.failures.is_empty(),
        "acceptance criteria failed: {}",
        tally.failures.join(", ")
    );
}
