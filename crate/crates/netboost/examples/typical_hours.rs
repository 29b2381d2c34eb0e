//! Reduces a 96-hour series with two alternating day types down to two
//! weighted typical hours, then solves the same planning problem on the full
//! and the reduced network. The clustering must recover the day types
//! exactly, so the two objectives agree to solver precision.

use netboost::planning::{ModelKind, ScenarioConfig};
use netboost::scenario::load_study_network;
use netboost::snapshots::{reduce_snapshots, FeatureMatrix};
use netboost::{reduce_series_dir, solve_plan};

use std::path::Path;

fn main() -> anyhow::Result<()> {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/two_daytypes");
    let full = load_study_network(&src)?;
    println!("source: {} snapshots over {} h", full.n_snapshots(), full.period_hours);

    let features = FeatureMatrix::from_network(&full);
    println!(
        "feature matrix: {} hours x {} columns ({:?}...)",
        features.n_rows(),
        features.columns.len(),
        &features.columns[..2]
    );

    let reduction = reduce_snapshots(&features, 2, 0)?;
    for (pos, (&rep, &w)) in reduction.representatives.iter().zip(&reduction.weights).enumerate() {
        println!(
            "cluster {pos}: represented by hour {} ({}), weight {} h, {} members",
            rep, full.snapshots[rep].label, w, reduction.sizes[pos]
        );
    }
    let total: f64 = reduction.weights.iter().sum();
    anyhow::ensure!(total == full.period_hours, "weights must sum to the period exactly");

    // Write the reduced directory and solve both studies.
    let dst = tempfile::tempdir()?;
    reduce_series_dir(&src, dst.path(), 2, 0)?;
    let reduced = load_study_network(dst.path())?;

    // Preventive model with a non-binding cap: booster activation costs are
    // booked per representative occurrence rather than weighted, so only a
    // booster-free plan reduces bit-losslessly.
    let cfg = ScenarioConfig {
        model: ModelKind::Preventive,
        co2_cap: Some(1e9),
        ..ScenarioConfig::default()
    };
    let full_obj = solve_plan(&full, &cfg)?.objective();
    let reduced_obj = solve_plan(&reduced, &cfg)?.objective();
    println!("objective on all 96 hours:       {full_obj:.2} EUR/a");
    println!("objective on 2 typical hours:    {reduced_obj:.2} EUR/a");
    let rel = (full_obj - reduced_obj).abs() / full_obj.abs();
    println!("relative gap: {rel:.3e}");
    anyhow::ensure!(rel <= 1e-9, "identical day types must reduce losslessly");
    Ok(())
}
