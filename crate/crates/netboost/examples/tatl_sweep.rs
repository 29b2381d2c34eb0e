//! Sweeps the temporary-overload factor on the two-zone network. Every step
//! up relaxes the security constraints, so the objective can only fall; the
//! last column shows how much generation investment the relaxation saves
//! against a strict N-1 plan, bought with growing corrective capacity.

use netboost::planning::{ModelKind, ScenarioConfig};
use netboost::scenario::{load_study_network, sweep_rows, SweepAxis, SweepSpec};

use std::path::Path;

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/two_zone");
    let net = load_study_network(&dir)?;
    let base = ScenarioConfig {
        co2_baseline: Some(1_160_000.0),
        co2_reduction: Some(0.6),
        ..ScenarioConfig::default()
    };
    let spec = SweepSpec {
        axis: SweepAxis::TatlFactor,
        values: vec![1.0, 1.1, 1.2, 1.3, 1.5],
        base,
        models: vec![ModelKind::Sequential],
    };

    let rows = sweep_rows(&net, &spec)?;
    println!(
        "{:>6} {:>16} {:>12} {:>10} {:>22}",
        "tatl", "total_eur", "nb_up_mw", "nb_dn_mw", "investment_saved_eur"
    );
    let mut last = f64::INFINITY;
    for r in &rows {
        anyhow::ensure!(r.summary.status == "ok", "point {} failed: {}", r.value, r.summary.status);
        let total = r.summary.cost.as_ref().unwrap().total;
        println!(
            "{:>6} {:>16.2} {:>12.2} {:>10.2} {:>22.2}",
            r.value,
            total,
            r.summary.nb_up_mw.unwrap(),
            r.summary.nb_dn_mw.unwrap(),
            r.investment_gap.unwrap(),
        );
        anyhow::ensure!(total <= last * (1.0 + 1e-9), "objective must not rise with relaxation");
        last = total;
    }
    Ok(())
}
