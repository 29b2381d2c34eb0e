//! Scenario front end: loads TOML configs, runs single studies, parameter
//! sweeps, and three-way strategy comparisons, and writes the report files.
//!
//! Every plan is verified against the raw network data before its files are
//! written; an unverified plan never reaches disk.

use rayon::prelude::*;
use serde::Serialize;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::lp::text::write_lp;
use crate::network::{load_network_with_period, Network, NetworkError};
use crate::planning::{
    solve_plan, verify_plan, write_plan, CostReport, ModelKind, PlanningError, ScenarioConfig,
    SolvedPlan, VerificationReport,
};
use crate::sensitivity::SensitivitySet;
use crate::snapshots::{read_period, SnapshotError};

/// Simultaneous may beat the cheaper of the other two strategies by at most
/// this relative slack before the run is flagged as a solver-tolerance
/// problem (the direction of the comparison is a mathematical certainty).
const DOMINANCE_REL_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config {path}: {msg}")]
    Config { path: String, msg: String },
    #[error(transparent)]
    Planning(#[from] PlanningError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("plan verification failed: {}", failed.join("; "))]
    Verification { failed: Vec<String> },
    #[error("cost dominance violated: simultaneous total {simultaneous} exceeds {cheaper_model} total {cheaper} by more than {tol}; probable solver tolerance issue")]
    Dominance { simultaneous: f64, cheaper_model: ModelKind, cheaper: f64, tol: f64 },
    #[error("sweep: {0}")]
    Sweep(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    /// Process exit code: 2 infeasible model, 3 failed verification or
    /// dominance, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Planning(PlanningError::Infeasible { .. }) => 2,
            ScenarioError::Verification { .. } | ScenarioError::Dominance { .. } => 3,
            _ => 1,
        }
    }
}

/// Reads a `ScenarioConfig` from a TOML file whose keys mirror the struct
/// fields. Unknown keys are errors, missing keys take defaults.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let cfg: ScenarioConfig = toml::from_str(&text).map_err(|e| ScenarioError::Config {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    cfg.validate().map_err(|e| ScenarioError::Config {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    Ok(cfg)
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<ModelKind>,
    pub tatl_factor: Option<f64>,
    /// Replaces whatever emission policy the file sets with a reduction
    /// fraction against the configured baseline.
    pub co2_reduction: Option<f64>,
    /// Sets both booster capital costs (up and down) to one value.
    pub nb_cost: Option<f64>,
    pub seed: Option<u64>,
}

pub fn apply_overrides(cfg: &mut ScenarioConfig, ov: &Overrides) {
    if let Some(m) = ov.model {
        cfg.model = m;
    }
    if let Some(f) = ov.tatl_factor {
        cfg.tatl_factor = f;
    }
    if let Some(r) = ov.co2_reduction {
        cfg.co2_reduction = Some(r);
        cfg.co2_cap = None;
    }
    if let Some(c) = ov.nb_cost {
        cfg.nb_capital_cost_up = c;
        cfg.nb_capital_cost_down = c;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
}

/// Loads a network directory, taking the modeled period from the sum of the
/// snapshot weights instead of assuming a full year. A 96-hour test series
/// and an 8760-hour year both load unchanged.
pub fn load_study_network(dir: impl AsRef<Path>) -> Result<Network, ScenarioError> {
    let dir = dir.as_ref();
    let period = read_period(dir)?;
    Ok(load_network_with_period(dir, period)?)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Write each solver stage as an LP-format text file under `lp/`.
    pub dump_lp: bool,
    /// Write the PTDF and LODF matrices as CSV.
    pub dump_sensitivities: bool,
}

/// Everything a finished run hands back to the caller.
#[derive(Debug)]
pub struct RunArtifacts {
    pub solved: SolvedPlan,
    pub report: VerificationReport,
}

/// Solves one scenario and writes the full report set under `out_dir`:
/// the plan files (`capacities.csv`, `nb_capacities.csv`, `flows.csv`,
/// `nb_dispatch.csv`, `costs.json`), a one-row `summary.csv`, and
/// `verification.txt`. Plan files are only written after every verification
/// check passes; on a failed check the verification report still lands on
/// disk and the call errors.
pub fn run_scenario(
    network_dir: impl AsRef<Path>,
    cfg: &ScenarioConfig,
    out_dir: impl AsRef<Path>,
    opts: &RunOptions,
) -> Result<RunArtifacts, ScenarioError> {
    let out_dir = out_dir.as_ref();
    let net = load_study_network(network_dir)?;
    let solved = solve_plan(&net, cfg)?;
    let report = verify_plan(&solved.plan, &net, cfg)?;

    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("verification.txt"), report.render())?;
    if opts.dump_sensitivities {
        dump_sensitivities(&net, cfg, out_dir)?;
    }
    if opts.dump_lp {
        let lp_dir = out_dir.join("lp");
        fs::create_dir_all(&lp_dir)?;
        for stage in &solved.stages {
            let name: String = stage
                .label
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                .collect();
            fs::write(lp_dir.join(format!("{name}.lp")), write_lp(&stage.lp))?;
        }
    }
    if !report.valid() {
        return Err(verification_error(&report));
    }

    write_plan(&solved.plan, &net, out_dir)?;
    let row = SummaryRow::from_solved(&solved);
    fs::write(out_dir.join("summary.csv"), summary_csv(&[row], None))?;
    Ok(RunArtifacts { solved, report })
}

fn verification_error(report: &VerificationReport) -> ScenarioError {
    ScenarioError::Verification {
        failed: report
            .failed()
            .iter()
            .map(|c| format!("{} (violation {:.3e} at {})", c.name, c.max_violation, c.worst))
            .collect(),
    }
}

/// PTDF and LODF as CSV, line ids as rows. LODF columns for bridge lines are
/// left empty: no redistribution factor exists for an islanding outage.
pub fn dump_sensitivities(
    net: &Network,
    cfg: &ScenarioConfig,
    out_dir: &Path,
) -> Result<(), ScenarioError> {
    let slack = cfg.slack_bus_id(net);
    let sens = SensitivitySet::compute(net, slack).map_err(PlanningError::from)?;
    let mut ptdf = String::from("line");
    for b in &net.buses {
        write!(ptdf, ",{}", b.id).unwrap();
    }
    ptdf.push('\n');
    for (l, line) in net.lines.iter().enumerate() {
        write!(ptdf, "{}", line.id).unwrap();
        for i in 0..net.n_buses() {
            write!(ptdf, ",{}", sens.ptdf[(l, i)]).unwrap();
        }
        ptdf.push('\n');
    }
    fs::write(out_dir.join("ptdf.csv"), ptdf)?;

    let mut lodf = String::from("line");
    for k in &net.lines {
        write!(lodf, ",{}", k.id).unwrap();
    }
    lodf.push('\n');
    for (l, line) in net.lines.iter().enumerate() {
        write!(lodf, "{}", line.id).unwrap();
        for (k, kline) in net.lines.iter().enumerate() {
            if sens.bridges.contains(&kline.id) {
                lodf.push(',');
            } else {
                write!(lodf, ",{}", sens.lodf[(l, k)]).unwrap();
            }
        }
        lodf.push('\n');
    }
    fs::write(out_dir.join("lodf.csv"), lodf)?;
    Ok(())
}

/// One summary line: where the money goes and how much booster capacity the
/// plan places.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub model: ModelKind,
    pub status: String,
    pub objective: Option<f64>,
    pub cost: Option<CostReport>,
    pub nb_up_mw: Option<f64>,
    pub nb_dn_mw: Option<f64>,
}

impl SummaryRow {
    fn from_solved(solved: &SolvedPlan) -> SummaryRow {
        let (up, dn) = solved.plan.total_nb_capacity();
        SummaryRow {
            model: solved.plan.model,
            status: "ok".into(),
            objective: Some(solved.objective()),
            cost: Some(solved.plan.cost_report.clone()),
            nb_up_mw: Some(up),
            nb_dn_mw: Some(dn),
        }
    }

    fn failed(model: ModelKind, reason: String) -> SummaryRow {
        SummaryRow { model, status: reason, objective: None, cost: None, nb_up_mw: None, nb_dn_mw: None }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders summary rows as CSV. `axis` prepends a labeled sweep column; a
/// TATL sweep appends the investment saved relative to strict N-1 security.
fn summary_csv(rows: &[SummaryRow], axis: Option<(&SweepAxis, &[f64], &[Option<f64>])>) -> String {
    let mut out = String::new();
    if let Some((axis, _, _)) = axis {
        write!(out, "{},", axis.column()).unwrap();
    }
    out.push_str("model,status,objective_eur,capital_generation_eur,operation_generation_eur,nb_capital_eur,nb_operation_eur,nb_total_eur,total_eur,nb_up_mw,nb_dn_mw");
    if matches!(axis, Some((SweepAxis::TatlFactor, _, _))) {
        out.push_str(",investment_gap_eur");
    }
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        if let Some((_, values, _)) = axis {
            write!(out, "{},", values[i]).unwrap();
        }
        let c = r.cost.as_ref();
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            csv_quote(&r.status),
            opt(r.objective),
            opt(c.map(|c| c.capital_generation)),
            opt(c.map(|c| c.operation_generation)),
            opt(c.map(|c| c.nb_capital)),
            opt(c.map(|c| c.nb_operation)),
            opt(c.map(|c| c.nb_capital + c.nb_operation)),
            opt(c.map(|c| c.total)),
            opt(r.nb_up_mw),
            opt(r.nb_dn_mw),
        )
        .unwrap();
        if let Some((SweepAxis::TatlFactor, _, gaps)) = axis {
            write!(out, ",{}", opt(gaps[i])).unwrap();
        }
        out.push('\n');
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Which scalar a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Emission reduction fraction against the configured baseline.
    Co2Reduction,
    /// Temporarily admissible loading relative to the permanent rating.
    TatlFactor,
    /// Booster capital cost, applied to both directions.
    NbCost,
}

impl SweepAxis {
    fn column(&self) -> &'static str {
        match self {
            SweepAxis::Co2Reduction => "co2_reduction",
            SweepAxis::TatlFactor => "tatl_factor",
            SweepAxis::NbCost => "nb_capital_cost_eur_per_mw_a",
        }
    }

    fn apply(&self, cfg: &mut ScenarioConfig, v: f64) {
        match self {
            SweepAxis::Co2Reduction => {
                cfg.co2_reduction = Some(v);
                cfg.co2_cap = None;
            }
            SweepAxis::TatlFactor => cfg.tatl_factor = v,
            SweepAxis::NbCost => {
                cfg.nb_capital_cost_up = v;
                cfg.nb_capital_cost_down = v;
            }
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "co2" | "co2_reduction" => Ok(SweepAxis::Co2Reduction),
            "tatl" | "tatl_factor" => Ok(SweepAxis::TatlFactor),
            "nbcost" | "nb_cost" => Ok(SweepAxis::NbCost),
            other => Err(format!("unknown sweep axis '{other}' (expected co2, tatl, or nbcost)")),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.column())
    }
}

/// A family of scenarios along one axis.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
    /// Models solved at every value; order becomes row order.
    pub models: Vec<ModelKind>,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, values: Vec<f64>, base: ScenarioConfig) -> SweepSpec {
        SweepSpec {
            axis,
            values,
            base,
            models: vec![ModelKind::Preventive, ModelKind::Sequential, ModelKind::Simultaneous],
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |msg: String| Err(ScenarioError::Sweep(msg));
        if self.values.is_empty() {
            return err("value list is empty".into());
        }
        if self.models.is_empty() {
            return err("model list is empty".into());
        }
        for &v in &self.values {
            match self.axis {
                SweepAxis::Co2Reduction if !(0.0..1.0).contains(&v) => {
                    return err(format!("co2 reduction {v} outside [0, 1)"));
                }
                SweepAxis::TatlFactor if !(v >= 1.0) => {
                    return err(format!("tatl factor {v} below 1"));
                }
                SweepAxis::NbCost if !(v >= 0.0) => {
                    return err(format!("booster cost {v} negative"));
                }
                _ => {}
            }
        }
        if self.axis == SweepAxis::Co2Reduction && self.base.co2_baseline.is_none() {
            return err("co2 sweep needs co2_baseline in the base config".into());
        }
        self.base.validate().map_err(|e| ScenarioError::Sweep(e.to_string()))
    }
}

/// One (axis value, model) result.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub summary: SummaryRow,
    /// TATL sweeps: strict N-1 investment minus this row's investment, the
    /// capital saved by allowing temporary overloads.
    pub investment_gap: Option<f64>,
}

/// Solves every (value, model) point independently; a failing point becomes
/// a row with its error in the status column and the sweep carries on. Rows
/// come back in deterministic (value-major, model-minor) order regardless of
/// the parallel schedule.
pub fn sweep_rows(net: &Network, spec: &SweepSpec) -> Result<Vec<SweepRow>, ScenarioError> {
    spec.validate()?;

    // Strict N-1 investment reference for the TATL gap column.
    let strict_capital: Option<f64> = if spec.axis == SweepAxis::TatlFactor {
        let mut cfg = spec.base.clone();
        cfg.model = ModelKind::Preventive;
        cfg.tatl_factor = 1.0;
        match solve_point(net, &cfg) {
            Ok(solved) => Some(solved.plan.cost_report.capital_generation),
            Err(e) => {
                log::warn!("strict N-1 reference failed, gap column left empty: {e}");
                None
            }
        }
    } else {
        None
    };

    let points: Vec<(f64, ModelKind)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.models.iter().map(move |&m| (v, m)))
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(v, model)| {
            let mut cfg = spec.base.clone();
            cfg.model = model;
            spec.axis.apply(&mut cfg, v);
            match solve_point(net, &cfg) {
                Ok(solved) => SweepRow {
                    value: v,
                    investment_gap: strict_capital
                        .map(|s| s - solved.plan.cost_report.capital_generation),
                    summary: SummaryRow::from_solved(&solved),
                },
                Err(e) => SweepRow {
                    value: v,
                    investment_gap: None,
                    summary: SummaryRow::failed(model, format!("failed: {e}")),
                },
            }
        })
        .collect();
    Ok(rows)
}

/// Solve plus mandatory verification; only verified plans count as results.
fn solve_point(net: &Network, cfg: &ScenarioConfig) -> Result<SolvedPlan, ScenarioError> {
    let solved = solve_plan(net, cfg)?;
    let report = verify_plan(&solved.plan, net, cfg)?;
    if !report.valid() {
        return Err(verification_error(&report));
    }
    Ok(solved)
}

/// Runs a sweep against a network directory and writes `summary.csv` under
/// `out_dir`. Identical inputs produce a byte-identical file.
pub fn run_sweep(
    network_dir: impl AsRef<Path>,
    spec: &SweepSpec,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<SweepRow>, ScenarioError> {
    let net = load_study_network(network_dir)?;
    let rows = sweep_rows(&net, spec)?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("summary.csv"), sweep_csv(spec, &rows))?;
    Ok(rows)
}

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let gaps: Vec<Option<f64>> = rows.iter().map(|r| r.investment_gap).collect();
    let summaries: Vec<SummaryRow> = rows.iter().map(|r| r.summary.clone()).collect();
    summary_csv(&summaries, Some((&spec.axis, &values, &gaps)))
}

/// Side-by-side costs of the three planning strategies on one study.
#[derive(Debug)]
pub struct Comparison {
    /// Preventive (at strict N-1), sequential, simultaneous, in that order.
    pub rows: Vec<SummaryRow>,
}

impl Comparison {
    pub fn total(&self, model: ModelKind) -> f64 {
        self.rows
            .iter()
            .find(|r| r.model == model)
            .and_then(|r| r.cost.as_ref())
            .map(|c| c.total)
            .expect("comparison holds all three models")
    }

    /// Fixed-width text table for terminal output.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<14} {:>16} {:>16} {:>14} {:>14} {:>12} {:>10} {:>10}",
            "model", "total_eur", "gen_capital", "gen_operation", "nb_capital", "nb_operation", "nb_up_mw", "nb_dn_mw"
        )
        .unwrap();
        for r in &self.rows {
            let c = r.cost.as_ref().expect("verified rows only");
            writeln!(
                out,
                "{:<14} {:>16.2} {:>16.2} {:>14.2} {:>14.2} {:>12.2} {:>10.2} {:>10.2}",
                r.model.to_string(),
                c.total,
                c.capital_generation,
                c.operation_generation,
                c.nb_capital,
                c.nb_operation,
                r.nb_up_mw.unwrap_or(0.0),
                r.nb_dn_mw.unwrap_or(0.0),
            )
            .unwrap();
        }
        out
    }
}

/// Solves all three strategies on one study: preventive hardened to strict
/// N-1 (no temporary overloads), sequential and simultaneous at the
/// configured TATL factor. Asserts the dominance ordering before returning:
/// the simultaneous optimum cannot beat itself being a superset model, so
/// `total(simultaneous) <= min(preventive, sequential)` up to solver
/// tolerance, and a violation is reported as an error rather than written.
pub fn compare_plans(net: &Network, cfg: &ScenarioConfig) -> Result<Comparison, ScenarioError> {
    let mut rows = Vec::with_capacity(3);
    for model in [ModelKind::Preventive, ModelKind::Sequential, ModelKind::Simultaneous] {
        let mut c = cfg.clone();
        c.model = model;
        if model == ModelKind::Preventive {
            c.tatl_factor = 1.0;
        }
        rows.push(SummaryRow::from_solved(&solve_point(net, &c)?));
    }
    let cmp = Comparison { rows };

    let sim = cmp.total(ModelKind::Simultaneous);
    let prev = cmp.total(ModelKind::Preventive);
    let seq = cmp.total(ModelKind::Sequential);
    let tol = DOMINANCE_REL_TOL * prev.abs().max(1.0);
    let (cheaper_model, cheaper) =
        if prev <= seq { (ModelKind::Preventive, prev) } else { (ModelKind::Sequential, seq) };
    if sim > cheaper + tol {
        return Err(ScenarioError::Dominance { simultaneous: sim, cheaper_model, cheaper, tol });
    }
    Ok(cmp)
}

/// Directory-level wrapper around [`compare_plans`]: writes
/// `comparison.csv` under `out_dir` after the dominance check passes.
pub fn compare_strategies(
    network_dir: impl AsRef<Path>,
    cfg: &ScenarioConfig,
    out_dir: impl AsRef<Path>,
) -> Result<Comparison, ScenarioError> {
    let net = load_study_network(network_dir)?;
    let cmp = compare_plans(&net, cfg)?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("comparison.csv"), summary_csv(&cmp.rows, None))?;
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn fixture(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
    }

    fn triangle_cfg() -> ScenarioConfig {
        ScenarioConfig { co2_cap: Some(400_000.0), ..ScenarioConfig::default() }
    }

    #[test]
    fn config_file_round_trips_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("study.toml");
        fs::write(
            &path,
            "model = \"preventive\"\ntatl_factor = 1.2\nco2_cap = 400000.0\nnb_capital_cost_up = 9000.0\n",
        )
        .unwrap();
        let mut cfg = load_config(&path).unwrap();
        assert_eq!(cfg.model, ModelKind::Preventive);
        assert_eq!(cfg.tatl_factor, 1.2);
        assert_eq!(cfg.nb_capital_cost_up, 9000.0);

        apply_overrides(
            &mut cfg,
            &Overrides {
                model: Some(ModelKind::Simultaneous),
                tatl_factor: Some(1.5),
                co2_reduction: Some(0.1),
                nb_cost: Some(100.0),
                seed: Some(7),
            },
        );
        assert_eq!(cfg.model, ModelKind::Simultaneous);
        assert_eq!(cfg.tatl_factor, 1.5);
        // A reduction override replaces an absolute cap.
        assert_eq!(cfg.co2_cap, None);
        assert_eq!(cfg.co2_reduction, Some(0.1));
        assert_eq!(cfg.nb_capital_cost_up, 100.0);
        assert_eq!(cfg.nb_capital_cost_down, 100.0);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "tatl_pactor = 1.2\n").unwrap();
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("tatl_pactor"), "{err}");
    }

    #[test]
    fn run_writes_the_full_report_set() {
        let out = tempfile::tempdir().unwrap();
        let cfg = triangle_cfg();
        let opts = RunOptions { dump_lp: true, dump_sensitivities: true };
        let arts = run_scenario(fixture("triangle"), &cfg, out.path(), &opts).unwrap();
        assert!(arts.report.valid());
        for f in [
            "capacities.csv",
            "nb_capacities.csv",
            "flows.csv",
            "nb_dispatch.csv",
            "costs.json",
            "summary.csv",
            "verification.txt",
            "ptdf.csv",
            "lodf.csv",
        ] {
            assert!(out.path().join(f).is_file(), "missing {f}");
        }
        // Sequential model solves two stages, so two LP dumps.
        let lps: Vec<_> = fs::read_dir(out.path().join("lp")).unwrap().collect();
        assert_eq!(lps.len(), 2);

        let summary = fs::read_to_string(out.path().join("summary.csv")).unwrap();
        assert!(summary.starts_with("model,status,objective_eur,"));
        assert!(summary.contains("sequential,ok,"));
    }

    #[test]
    fn infeasible_scenarios_exit_with_code_two() {
        let out = tempfile::tempdir().unwrap();
        let mut cfg = triangle_cfg();
        cfg.co2_cap = Some(0.0);
        let err = run_scenario(fixture("triangle"), &cfg, out.path(), &RunOptions::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("co2"), "{err}");
        // No plan files written for an unsolved scenario.
        assert!(!out.path().join("capacities.csv").exists());
    }

    #[test]
    fn sweep_isolates_failing_points() {
        let net = load_study_network(fixture("triangle")).unwrap();
        // 0.99 reduction of the 400 kt baseline leaves 4 kt, far below what
        // the all-gas fixture can do, so those three rows must fail alone.
        let base = ScenarioConfig {
            co2_baseline: Some(400_000.0),
            co2_reduction: Some(0.0),
            ..ScenarioConfig::default()
        };
        let spec = SweepSpec::new(SweepAxis::Co2Reduction, vec![0.0, 0.99], base);
        let rows = sweep_rows(&net, &spec).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            if r.value == 0.0 {
                assert_eq!(r.summary.status, "ok");
                assert!(r.summary.objective.is_some());
            } else {
                assert!(r.summary.status.starts_with("failed:"), "{}", r.summary.status);
                assert!(r.summary.status.contains("co2"));
                assert!(r.summary.objective.is_none());
            }
        }
        let csv = sweep_csv(&spec, &rows);
        assert!(csv.starts_with("co2_reduction,model,status,"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn tatl_sweep_reports_the_investment_gap() {
        let net = load_study_network(fixture("triangle")).unwrap();
        let spec = SweepSpec {
            axis: SweepAxis::TatlFactor,
            values: vec![1.0, 1.3],
            base: triangle_cfg(),
            models: vec![ModelKind::Preventive],
        };
        let rows = sweep_rows(&net, &spec).unwrap();
        assert_eq!(rows.len(), 2);
        // At the strict factor the gap is zero by construction.
        assert_eq!(rows[0].investment_gap.unwrap(), 0.0);
        // Relaxing the limit can only save investment.
        assert!(rows[1].investment_gap.unwrap() >= -1e-6);
        let csv = sweep_csv(&spec, &rows);
        assert!(csv.lines().next().unwrap().ends_with(",investment_gap_eur"));
    }

    #[test]
    fn identical_sweeps_are_byte_identical() {
        let net = load_study_network(fixture("triangle")).unwrap();
        let spec = SweepSpec::new(SweepAxis::TatlFactor, vec![1.0, 1.2, 1.5], triangle_cfg());
        let a = sweep_csv(&spec, &sweep_rows(&net, &spec).unwrap());
        let b = sweep_csv(&spec, &sweep_rows(&net, &spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn comparison_orders_the_three_strategies() {
        let net = load_study_network(fixture("triangle")).unwrap();
        let cmp = compare_plans(&net, &triangle_cfg()).unwrap();
        assert_eq!(cmp.rows.len(), 3);
        let sim = cmp.total(ModelKind::Simultaneous);
        let prev = cmp.total(ModelKind::Preventive);
        let seq = cmp.total(ModelKind::Sequential);
        assert!(sim <= prev.min(seq) + 1e-6 * prev.abs());
        // The triangle is congested under contingencies: buying corrective
        // flexibility must beat hardening to strict N-1.
        assert!(sim < prev - 1.0);
        let table = cmp.render();
        assert!(table.contains("preventive") && table.contains("simultaneous"));
    }

    #[test]
    fn uncongested_network_costs_the_same_under_all_strategies() {
        let net = load_study_network(fixture("triangle_uncongested")).unwrap();
        let cmp = compare_plans(&net, &triangle_cfg()).unwrap();
        let prev = cmp.total(ModelKind::Preventive);
        for m in [ModelKind::Sequential, ModelKind::Simultaneous] {
            assert!((cmp.total(m) - prev).abs() <= 1e-6 * prev.abs());
        }
    }
}
