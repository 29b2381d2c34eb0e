//! Capacity planning under N-1 transmission security.
//!
//! Three model shapes share one constraint vocabulary:
//!
//! - **preventive**: a generation investment LP whose post-outage flow rows
//!   use the short-term line rating (PATL times `tatl_factor`). With a factor
//!   of 1 this is the classical strict N-1 problem; with a factor above 1 it
//!   is the relaxed variant that leans on fast corrective resources.
//! - **sequential**: the relaxed investment LP is solved first, then network
//!   booster capacities (fast injection/absorption pairs at buses) are placed
//!   in a second LP against the fixed first-stage flows so that every
//!   corrected post-outage flow returns below the permanent rating.
//! - **simultaneous**: one LP owning all variables of both stages, free to
//!   trade preventive flow headroom against corrective booster capacity per
//!   line.
//!
//! Solutions are extracted by variable name, re-costed from first principles
//! and audited by an independent constraint verifier that never reuses the
//! solver's own numbers.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::lp::{
    diagnose_infeasibility, solve, Backend, LinearProgram, LpError, Solution, SolveOptions,
    SolveStatus,
};
use crate::network::Network;
use crate::sensitivity::SensitivityError;

mod build;
mod verify;

pub use build::{
    build_investment_lp, build_nb_placement_lp, build_simultaneous_lp, extract_plan, BuiltModel,
};
pub use verify::{verify_plan, CheckResult, VerificationReport};

/// Which of the three planning formulations to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Preventive,
    Sequential,
    Simultaneous,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Preventive => "preventive",
            ModelKind::Sequential => "sequential",
            ModelKind::Simultaneous => "simultaneous",
        })
    }
}

impl FromStr for ModelKind {
    type Err = PlanningError;

    fn from_str(s: &str) -> Result<Self, PlanningError> {
        match s {
            "preventive" => Ok(ModelKind::Preventive),
            "sequential" => Ok(ModelKind::Sequential),
            "simultaneous" => Ok(ModelKind::Simultaneous),
            other => Err(PlanningError::Config(format!(
                "unknown model '{other}' (expected preventive, sequential or simultaneous)"
            ))),
        }
    }
}

/// Scenario parameters. Deserializes from a flat key-value file; every field
/// has a default so partial configs are fine. Exactly one way of stating the
/// emission limit must be present: either `co2_cap` directly, or
/// `co2_reduction` together with `co2_baseline`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    /// Emission cap in tCO2 per period.
    pub co2_cap: Option<f64>,
    /// Fractional reduction in [0, 1) applied to `co2_baseline`.
    pub co2_reduction: Option<f64>,
    /// Reference emissions in tCO2 per period that `co2_reduction` scales.
    pub co2_baseline: Option<f64>,
    /// Short-term (pre-correction) line rating as a multiple of PATL; >= 1.
    pub tatl_factor: f64,
    /// Annualized booster capacity costs in EUR/MW/a.
    pub nb_capital_cost_up: f64,
    pub nb_capital_cost_down: f64,
    /// Booster activation costs in EUR/MWh; small positive values keep
    /// optima from charging and discharging at one bus simultaneously.
    pub nb_dispatch_cost_up: f64,
    pub nb_dispatch_cost_down: f64,
    /// Outages to secure against. Default: every non-bridge line.
    pub contingencies: Option<Vec<String>>,
    /// Reference bus for angles and sensitivities. Default: first bus.
    pub slack_bus: Option<String>,
    pub solver: Backend,
    pub feasibility_tol: f64,
    /// Seed for any randomized preprocessing (snapshot clustering).
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            model: ModelKind::Sequential,
            co2_cap: None,
            co2_reduction: None,
            co2_baseline: None,
            tatl_factor: 1.3,
            nb_capital_cost_up: 23_000.0,
            nb_capital_cost_down: 23_000.0,
            nb_dispatch_cost_up: 0.01,
            nb_dispatch_cost_down: 0.01,
            contingencies: None,
            slack_bus: None,
            solver: Backend::default(),
            feasibility_tol: 1e-6,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Range and consistency checks that do not need the network.
    pub fn validate(&self) -> Result<(), PlanningError> {
        if !(self.tatl_factor >= 1.0) {
            return Err(PlanningError::Config(format!(
                "tatl_factor must be >= 1, got {}",
                self.tatl_factor
            )));
        }
        for (name, v) in [
            ("nb_capital_cost_up", self.nb_capital_cost_up),
            ("nb_capital_cost_down", self.nb_capital_cost_down),
            ("nb_dispatch_cost_up", self.nb_dispatch_cost_up),
            ("nb_dispatch_cost_down", self.nb_dispatch_cost_down),
        ] {
            if !(v >= 0.0) {
                return Err(PlanningError::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.feasibility_tol > 0.0) {
            return Err(PlanningError::Config("feasibility_tol must be > 0".into()));
        }
        self.resolved_co2_cap().map(|_| ())
    }

    /// The emission cap in effect, from whichever form the config used.
    pub fn resolved_co2_cap(&self) -> Result<f64, PlanningError> {
        match (self.co2_cap, self.co2_reduction, self.co2_baseline) {
            (Some(cap), None, _) => {
                if cap < 0.0 {
                    Err(PlanningError::Config(format!("co2_cap must be >= 0, got {cap}")))
                } else {
                    Ok(cap)
                }
            }
            (None, Some(r), Some(base)) => {
                if !(0.0..1.0).contains(&r) {
                    Err(PlanningError::Config(format!(
                        "co2_reduction must be in [0, 1), got {r}"
                    )))
                } else if base < 0.0 {
                    Err(PlanningError::Config(format!("co2_baseline must be >= 0, got {base}")))
                } else {
                    Ok((1.0 - r) * base)
                }
            }
            (None, Some(_), None) => Err(PlanningError::Config(
                "co2_reduction needs co2_baseline to scale".into(),
            )),
            (Some(_), Some(_), _) => Err(PlanningError::Config(
                "give either co2_cap or co2_reduction, not both".into(),
            )),
            (None, None, _) => Err(PlanningError::Config(
                "an emission limit is required: set co2_cap, or co2_reduction with co2_baseline"
                    .into(),
            )),
        }
    }

    /// Reference bus id, defaulting to the first bus.
    pub fn slack_bus_id<'a>(&'a self, net: &'a Network) -> &'a str {
        self.slack_bus.as_deref().unwrap_or(&net.buses[0].id)
    }

    pub(crate) fn solve_options(&self) -> SolveOptions {
        SolveOptions { backend: self.solver, feasibility_tol: self.feasibility_tol, verify: true }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlanningError {
    #[error("config: {0}")]
    Config(String),
    #[error("contingency line '{0}' does not exist")]
    UnknownContingency(String),
    #[error(
        "contingency line '{0}' is a bridge; its outage splits the network, so no \
         redistribution exists to secure against"
    )]
    BridgeContingency(String),
    #[error(
        "first-stage flows break the relaxed post-outage limit at snapshot {snapshot}, \
         outage {outage}, line {line} (excess {excess:.6} MW); booster placement needs \
         flows that respect the short-term rating"
    )]
    StageOneViolation { snapshot: usize, outage: String, line: String, excess: f64 },
    #[error("{stage} LP is infeasible; binding limits: {}", blame_list(.blamed))]
    Infeasible { stage: String, blamed: Vec<(String, f64)> },
    #[error("{stage} LP is unbounded")]
    Unbounded { stage: String },
    #[error("{stage} solve failed: {message}")]
    Solver { stage: String, message: String },
    #[error("solution is missing variable '{0}'")]
    MissingVariable(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn blame_list(blamed: &[(String, f64)]) -> String {
    if blamed.is_empty() {
        return "none identified".into();
    }
    blamed
        .iter()
        .take(3)
        .map(|(name, s)| format!("{name} (needs {s:.3} more)"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Annualized cost decomposition in EUR per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub capital_generation: f64,
    pub operation_generation: f64,
    pub nb_capital: f64,
    pub nb_operation: f64,
    pub total: f64,
}

/// A solved plan in network index order: generators, lines, buses and
/// snapshots follow the `Network` ordering; booster dispatch is additionally
/// indexed by the position in `contingencies`. Booster fields are empty for
/// models without boosters.
#[derive(Debug, Clone)]
pub struct PlanResult {
    pub model: ModelKind,
    pub generator_capacity: Vec<f64>,
    /// `[snapshot][generator]` MW.
    pub dispatch: Vec<Vec<f64>>,
    /// `[snapshot][line]` MW, positive in line orientation.
    pub line_flow: Vec<Vec<f64>>,
    /// `[snapshot][bus]` voltage angles behind the flows (internal units).
    pub angles: Vec<Vec<f64>>,
    pub nb_capacity_up: Vec<f64>,
    pub nb_capacity_down: Vec<f64>,
    /// `[snapshot][contingency][bus]` MW.
    pub nb_dispatch_up: Vec<Vec<Vec<f64>>>,
    pub nb_dispatch_down: Vec<Vec<Vec<f64>>>,
    /// Outage line ids, in the model's fixed order.
    pub contingencies: Vec<String>,
    pub cost_report: CostReport,
}

impl PlanResult {
    pub fn has_boosters(&self) -> bool {
        !self.nb_capacity_up.is_empty()
    }

    /// Total installed booster capacity (up, down) in MW.
    pub fn total_nb_capacity(&self) -> (f64, f64) {
        // + 0.0 turns the empty-sum identity -0.0 into a plain 0.
        (
            self.nb_capacity_up.iter().sum::<f64>() + 0.0,
            self.nb_capacity_down.iter().sum::<f64>() + 0.0,
        )
    }
}

/// One LP solve with its inputs kept around for dumping and inspection.
#[derive(Debug)]
pub struct StageSolve {
    pub label: String,
    pub lp: LinearProgram,
    pub solution: Solution,
    pub wall_ms: f64,
}

/// A plan plus the stage solves that produced it (one stage for preventive
/// and simultaneous, two for sequential).
#[derive(Debug)]
pub struct SolvedPlan {
    pub plan: PlanResult,
    pub stages: Vec<StageSolve>,
}

impl SolvedPlan {
    pub fn objective(&self) -> f64 {
        self.stages.iter().map(|s| s.solution.objective).sum()
    }
}

/// Builds and solves the configured model. Infeasible stages come back with
/// the relaxable constraints that pinch (structural equalities stay hard in
/// the diagnosis, so blame lands on a limit such as an emission cap or a
/// line rating).
pub fn solve_plan(net: &Network, cfg: &ScenarioConfig) -> Result<SolvedPlan, PlanningError> {
    cfg.validate()?;
    match cfg.model {
        ModelKind::Preventive => {
            let built = build_investment_lp(net, cfg)?;
            let stage = run_stage("investment", built.lp, cfg)?;
            let plan = extract_plan(
                &stage.solution.values,
                net,
                cfg,
                ModelKind::Preventive,
                &built.contingencies,
            )?;
            Ok(SolvedPlan { plan, stages: vec![stage] })
        }
        ModelKind::Sequential => {
            let built = build_investment_lp(net, cfg)?;
            let stage1 = run_stage("investment", built.lp, cfg)?;
            let flows = build::flows_from_values(&stage1.solution.values, net)?;
            let built2 = build_nb_placement_lp(net, &flows, cfg)?;
            let stage2 = run_stage("booster placement", built2.lp, cfg)?;
            let mut values = stage1.solution.values.clone();
            values.extend(stage2.solution.values.clone());
            let plan =
                extract_plan(&values, net, cfg, ModelKind::Sequential, &built2.contingencies)?;
            Ok(SolvedPlan { plan, stages: vec![stage1, stage2] })
        }
        ModelKind::Simultaneous => {
            let built = build_simultaneous_lp(net, cfg)?;
            let stage = run_stage("combined", built.lp, cfg)?;
            let plan = extract_plan(
                &stage.solution.values,
                net,
                cfg,
                ModelKind::Simultaneous,
                &built.contingencies,
            )?;
            Ok(SolvedPlan { plan, stages: vec![stage] })
        }
    }
}

/// Rows that the infeasibility diagnosis may relax. Power balance, flow
/// physics and booster energy balance stay hard; limits take the blame.
fn relaxable_row(name: &str) -> bool {
    !(name.starts_with("balance/") || name.starts_with("kvl/") || name.starts_with("nb_bal/"))
}

fn run_stage(
    label: &str,
    lp: LinearProgram,
    cfg: &ScenarioConfig,
) -> Result<StageSolve, PlanningError> {
    let opts = cfg.solve_options();
    let start = Instant::now();
    let solution = solve(&lp, &opts);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    log::info!(
        "{label}: {} vars, {} rows, {} in {:.1} ms",
        lp.n_variables(),
        lp.n_constraints(),
        solution.status,
        wall_ms
    );
    match solution.status {
        SolveStatus::Optimal => Ok(StageSolve { label: label.to_string(), lp, solution, wall_ms }),
        SolveStatus::Infeasible => {
            let blamed = diagnose_infeasibility(&lp, &relaxable_row, &opts);
            Err(PlanningError::Infeasible { stage: label.to_string(), blamed })
        }
        SolveStatus::Unbounded => Err(PlanningError::Unbounded { stage: label.to_string() }),
        SolveStatus::Error => Err(PlanningError::Solver {
            stage: label.to_string(),
            message: solution.message.unwrap_or_else(|| "no detail".into()),
        }),
    }
}

/// Writes the plan file set into `dir`: `capacities.csv`,
/// `nb_capacities.csv`, `flows.csv`, `nb_dispatch.csv` and `costs.json`.
/// Booster files keep their headers even when the model has no boosters.
pub fn write_plan(plan: &PlanResult, net: &Network, dir: impl AsRef<Path>) -> Result<(), PlanningError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;

    let mut caps = String::from("generator,mw\n");
    for (s, g) in net.generators.iter().zip(&plan.generator_capacity) {
        caps.push_str(&format!("{},{}\n", s.id, g));
    }
    fs::write(dir.join("capacities.csv"), caps)?;

    let mut nb = String::from("bus,p_plus_mw,p_minus_mw\n");
    if plan.has_boosters() {
        for (i, bus) in net.buses.iter().enumerate() {
            nb.push_str(&format!(
                "{},{},{}\n",
                bus.id, plan.nb_capacity_up[i], plan.nb_capacity_down[i]
            ));
        }
    }
    fs::write(dir.join("nb_capacities.csv"), nb)?;

    let mut flows = String::from("line,snapshot,mw\n");
    for (t, snap) in net.snapshots.iter().enumerate() {
        for (l, line) in net.lines.iter().enumerate() {
            flows.push_str(&format!("{},{},{}\n", line.id, snap.label, plan.line_flow[t][l]));
        }
    }
    fs::write(dir.join("flows.csv"), flows)?;

    let mut nbd = String::from("bus,snapshot,contingency,p_plus_mw,p_minus_mw\n");
    if plan.has_boosters() {
        for (t, snap) in net.snapshots.iter().enumerate() {
            for (k, outage) in plan.contingencies.iter().enumerate() {
                for (i, bus) in net.buses.iter().enumerate() {
                    nbd.push_str(&format!(
                        "{},{},{},{},{}\n",
                        bus.id,
                        snap.label,
                        outage,
                        plan.nb_dispatch_up[t][k][i],
                        plan.nb_dispatch_down[t][k][i]
                    ));
                }
            }
        }
    }
    fs::write(dir.join("nb_dispatch.csv"), nbd)?;

    let mut costs = serde_json::to_string_pretty(&plan.cost_report)
        .expect("cost report serializes");
    costs.push('\n');
    fs::write(dir.join("costs.json"), costs)?;
    Ok(())
}
