//! Solver-agnostic linear programs (minimize only) with pluggable backends.
//!
//! The representation is deliberately plain: named variables with bounds and
//! objective coefficients, named constraints with a sense and right-hand
//! side. Backends ([`Backend`]) turn an [`LinearProgram`] into a [`Solution`];
//! every optimal solution is re-checked here against the stored rows
//! ([`solution_violations`]) rather than trusting the backend's feasibility
//! claim. [`text`] provides a plain-text interchange round trip, and
//! [`diagnose_infeasibility`] names the constraint groups an infeasible
//! program would need to break.

mod backends;
mod simplex;
pub mod text;

pub use backends::{solve, Backend, SolveOptions};

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("duplicate variable name '{0}'")]
    DuplicateVariable(String),
    #[error("duplicate constraint name '{0}'")]
    DuplicateConstraint(String),
    #[error("variable '{0}': lower bound {1} exceeds upper bound {2}")]
    InvertedBounds(String, f64, f64),
    #[error("unknown variable referenced in constraint '{0}'")]
    UnknownVariable(String),
    #[error("variable '{0}' missing from solution values")]
    MissingValue(String),
    #[error("lp text format: {0}")]
    Text(String),
}

/// Handle to a registered variable, valid only for the program that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct VarDef {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct ConDef {
    pub name: String,
    /// (variable index, coefficient), one entry per variable, ascending index.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization LP under construction or ready to solve.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    name: String,
    pub(crate) vars: Vec<VarDef>,
    pub(crate) cons: Vec<ConDef>,
    var_index: HashMap<String, usize>,
    con_index: HashMap<String, usize>,
}

impl LinearProgram {
    pub fn new(name: impl Into<String>) -> Self {
        LinearProgram { name: name.into(), ..Default::default() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_variables(&self) -> usize {
        self.vars.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.cons.len()
    }

    /// Registers a variable with bounds `[lb, ub]` (infinities allowed) and
    /// its objective coefficient.
    pub fn add_variable(&mut self, name: &str, lb: f64, ub: f64, obj: f64) -> Result<VarId, LpError> {
        if self.var_index.contains_key(name) {
            return Err(LpError::DuplicateVariable(name.into()));
        }
        if !(lb <= ub) {
            return Err(LpError::InvertedBounds(name.into(), lb, ub));
        }
        let id = self.vars.len();
        self.vars.push(VarDef { name: name.into(), lb, ub, obj });
        self.var_index.insert(name.into(), id);
        Ok(VarId(id))
    }

    /// Adds `terms {sense} rhs`. Repeated variables in `terms` are summed;
    /// an empty term list is legal and trivially checked at solve time.
    /// Two-sided limits are expressed as two calls with `/hi` and `/lo` names.
    pub fn add_constraint(
        &mut self,
        name: &str,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<(), LpError> {
        if self.con_index.contains_key(name) {
            return Err(LpError::DuplicateConstraint(name.into()));
        }
        let mut dense: HashMap<usize, f64> = HashMap::new();
        for (v, c) in terms {
            if v.0 >= self.vars.len() {
                return Err(LpError::UnknownVariable(name.into()));
            }
            *dense.entry(v.0).or_insert(0.0) += c;
        }
        let mut terms: Vec<(usize, f64)> = dense.into_iter().filter(|&(_, c)| c != 0.0).collect();
        terms.sort_unstable_by_key(|&(v, _)| v);
        self.con_index.insert(name.into(), self.cons.len());
        self.cons.push(ConDef { name: name.into(), terms, sense, rhs });
        Ok(())
    }

    pub fn variable(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied().map(VarId)
    }

    pub fn variable_name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn variable_names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    pub fn constraint_names(&self) -> impl Iterator<Item = &str> {
        self.cons.iter().map(|c| c.name.as_str())
    }

    pub fn bounds(&self, id: VarId) -> (f64, f64) {
        (self.vars[id.0].lb, self.vars[id.0].ub)
    }

    pub fn objective_coefficient(&self, id: VarId) -> f64 {
        self.vars[id.0].obj
    }

    /// Dot product of the objective with a value assignment.
    pub fn objective_value(&self, values: &HashMap<String, f64>) -> Result<f64, LpError> {
        let mut total = 0.0;
        for v in &self.vars {
            if v.obj != 0.0 {
                let x = values.get(&v.name).ok_or_else(|| LpError::MissingValue(v.name.clone()))?;
                total += v.obj * x;
            }
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Error,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        })
    }
}

/// Solver outcome. `values` is populated only when `status == Optimal`, and
/// `objective` is recomputed from the stored coefficients, not taken from the
/// backend. `duals` is backend-dependent and may be absent.
#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: HashMap<String, f64>,
    pub duals: Option<HashMap<String, f64>>,
    pub message: Option<String>,
}

impl Solution {
    pub fn value(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    pub(crate) fn failed(status: SolveStatus, message: impl Into<String>) -> Self {
        Solution { status, objective: f64::NAN, values: HashMap::new(), duals: None, message: Some(message.into()) }
    }
}

/// Worst violation of a value assignment against bounds and constraints.
#[derive(Debug, Clone)]
pub struct ViolationReport {
    pub max_violation: f64,
    /// Name of the worst-violated constraint or bound, if any violation > 0.
    pub worst: Option<String>,
}

/// Independent feasibility check: evaluates every bound and constraint of
/// `lp` at `values`. Never consults the backend.
pub fn solution_violations(lp: &LinearProgram, values: &HashMap<String, f64>) -> Result<ViolationReport, LpError> {
    let mut x = vec![0.0; lp.vars.len()];
    for (i, v) in lp.vars.iter().enumerate() {
        x[i] = *values.get(&v.name).ok_or_else(|| LpError::MissingValue(v.name.clone()))?;
    }
    let mut max_violation = 0.0;
    let mut worst = None;
    let mut note = |amount: f64, name: &str| {
        if amount > max_violation {
            max_violation = amount;
            worst = Some(name.to_string());
        }
    };
    for (i, v) in lp.vars.iter().enumerate() {
        note(v.lb - x[i], &format!("bound lb {}", v.name));
        note(x[i] - v.ub, &format!("bound ub {}", v.name));
    }
    for c in &lp.cons {
        let lhs: f64 = c.terms.iter().map(|&(v, coef)| coef * x[v]).sum();
        let amount = match c.sense {
            Sense::Le => lhs - c.rhs,
            Sense::Ge => c.rhs - lhs,
            Sense::Eq => (lhs - c.rhs).abs(),
        };
        note(amount, &c.name);
    }
    Ok(ViolationReport { max_violation, worst })
}

/// Explains an infeasible program: re-solves with nonnegative elastic slack
/// added to every constraint for which `relaxable(name)` is true (objective:
/// total slack), and returns the constraints that still need slack, largest
/// first. Equality and structural rows are typically kept hard so the blame
/// lands on the limit that actually pinches.
pub fn diagnose_infeasibility(
    lp: &LinearProgram,
    relaxable: &dyn Fn(&str) -> bool,
    opts: &SolveOptions,
) -> Vec<(String, f64)> {
    let mut elastic = LinearProgram::new(format!("{}/elastic", lp.name));
    for v in &lp.vars {
        elastic.add_variable(&v.name, v.lb, v.ub, 0.0).expect("names unique in source lp");
    }
    let mut slack_of = Vec::new();
    for c in &lp.cons {
        let terms: Vec<(VarId, f64)> = c.terms.iter().map(|&(v, coef)| (VarId(v), coef)).collect();
        if !relaxable(&c.name) {
            elastic.add_constraint(&c.name, terms, c.sense, c.rhs).expect("copy of valid constraint");
            continue;
        }
        let mut with_slack = terms;
        match c.sense {
            Sense::Le => {
                let s = elastic.add_variable(&format!("elastic_slack/{}", c.name), 0.0, f64::INFINITY, 1.0).unwrap();
                with_slack.push((s, -1.0));
            }
            Sense::Ge => {
                let s = elastic.add_variable(&format!("elastic_slack/{}", c.name), 0.0, f64::INFINITY, 1.0).unwrap();
                with_slack.push((s, 1.0));
            }
            Sense::Eq => {
                let up = elastic.add_variable(&format!("elastic_slack/{}/up", c.name), 0.0, f64::INFINITY, 1.0).unwrap();
                let dn = elastic.add_variable(&format!("elastic_slack/{}/dn", c.name), 0.0, f64::INFINITY, 1.0).unwrap();
                with_slack.push((up, 1.0));
                with_slack.push((dn, -1.0));
            }
        }
        elastic.add_constraint(&c.name, with_slack, c.sense, c.rhs).expect("copy of valid constraint");
        slack_of.push(c.name.clone());
    }
    let sol = solve(&elastic, opts);
    if sol.status != SolveStatus::Optimal {
        return vec![];
    }
    let mut blamed: Vec<(String, f64)> = slack_of
        .into_iter()
        .filter_map(|name| {
            let s = sol.value(&format!("elastic_slack/{name}"))
                + sol.value(&format!("elastic_slack/{name}/up"))
                + sol.value(&format!("elastic_slack/{name}/dn"));
            (s > opts.feasibility_tol).then_some((name, s))
        })
        .collect();
    blamed.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    blamed
}
