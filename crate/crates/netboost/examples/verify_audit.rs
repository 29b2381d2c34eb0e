//! The verifier re-derives every physical and economic constraint from the
//! raw network data, independent of the LP that produced the plan. This
//! example first audits an honest plan, then tampers with it two different
//! ways and shows that the audit names the exact check that breaks.

use netboost::planning::{ModelKind, ScenarioConfig};
use netboost::{load_network, solve_plan, verify_plan};

use std::path::Path;

fn main() -> anyhow::Result<()> {
    let net = load_network(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/triangle"))?;
    let cfg = ScenarioConfig {
        model: ModelKind::Simultaneous,
        co2_cap: Some(400_000.0),
        ..ScenarioConfig::default()
    };
    let honest = solve_plan(&net, &cfg)?.plan;

    let report = verify_plan(&honest, &net, &cfg)?;
    anyhow::ensure!(report.valid(), "honest plan must pass");
    println!("honest plan: all {} checks pass", report.checks.len());

    // Tampering 1: inflate one flow 10% past the permanent rating. The
    // physics checks (balance, KVL) catch the inconsistency too, but the
    // named rating check must fire regardless.
    let mut overload = honest.clone();
    overload.line_flow[0][0] = net.lines[0].patl * 1.1;
    let report = verify_plan(&overload, &net, &cfg)?;
    println!("\ninflated flow on {}:", net.lines[0].id);
    for c in report.failed() {
        println!("  FAIL {:<18} violation {:.3e} at {}", c.name, c.max_violation, c.worst);
    }
    anyhow::ensure!(!report.check("patl_base").unwrap().pass);

    // Tampering 2: shrink a booster below its own dispatch. Only the bounds
    // check fails; the physics stays intact because dispatch was untouched.
    let mut undersized = honest.clone();
    for p in undersized.nb_capacity_up.iter_mut().chain(undersized.nb_capacity_down.iter_mut()) {
        *p *= 0.5;
    }
    let report = verify_plan(&undersized, &net, &cfg)?;
    println!("\nhalved booster capacities:");
    for c in report.failed() {
        println!("  FAIL {:<18} violation {:.3e} at {}", c.name, c.max_violation, c.worst);
    }
    anyhow::ensure!(!report.check("dispatch_bounds").unwrap().pass);
    anyhow::ensure!(report.check("nodal_balance").unwrap().pass);
    Ok(())
}
