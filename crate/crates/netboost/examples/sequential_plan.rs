//! Sequential planning on the two-zone network. Stage one sizes generation
//! against relaxed post-outage limits (temporary overloads up to the TATL
//! factor are acceptable); stage two buys just enough fast corrective
//! capability, bus by bus, to bring every overload back under the permanent
//! rating before it would damage equipment.

use netboost::planning::ScenarioConfig;
use netboost::scenario::load_study_network;
use netboost::{solve_plan, verify_plan};

use std::path::Path;

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/two_zone");
    let net = load_study_network(&dir)?;
    let cfg = ScenarioConfig {
        co2_baseline: Some(1_160_000.0),
        co2_reduction: Some(0.6),
        ..ScenarioConfig::default() // model defaults to sequential, TATL 1.3
    };

    let solved = solve_plan(&net, &cfg)?;
    for stage in &solved.stages {
        println!(
            "stage '{}': {} variables, objective {:.2} EUR/a, {:.1} ms",
            stage.label,
            stage.lp.n_variables(),
            stage.solution.objective,
            stage.wall_ms
        );
    }

    let plan = &solved.plan;
    println!("\ninstalled generation:");
    for (s, gen) in net.generators.iter().enumerate() {
        println!("  {:<9} {:>8.2} MW", gen.id, plan.generator_capacity[s]);
    }

    println!("booster capacity by bus (up / down):");
    for (i, bus) in net.buses.iter().enumerate() {
        let (up, dn) = (plan.nb_capacity_up[i], plan.nb_capacity_down[i]);
        if up > 1e-6 || dn > 1e-6 {
            println!("  {:<4} {:>7.2} MW / {:>7.2} MW", bus.id, up, dn);
        }
    }

    // Worst corrective action across snapshots and outages, to show what the
    // capacity is actually for.
    let mut worst = (0.0f64, 0, 0, 0);
    for (t, per_outage) in plan.nb_dispatch_up.iter().enumerate() {
        for (k, per_bus) in per_outage.iter().enumerate() {
            for (i, &p) in per_bus.iter().enumerate() {
                if p > worst.0 {
                    worst = (p, t, k, i);
                }
            }
        }
    }
    println!(
        "largest single action: inject {:.2} MW at {} during outage of {} in snapshot {}",
        worst.0, net.buses[worst.3].id, plan.contingencies[worst.2], net.snapshots[worst.1].label
    );

    let cost = &plan.cost_report;
    println!(
        "\ncosts: generation capital {:.0}, operation {:.0}, booster capital {:.0}, booster operation {:.2}",
        cost.capital_generation, cost.operation_generation, cost.nb_capital, cost.nb_operation
    );

    let report = verify_plan(plan, &net, &cfg)?;
    anyhow::ensure!(report.valid(), "verification failed:\n{}", report.render());
    println!("all verification checks passed");
    Ok(())
}
