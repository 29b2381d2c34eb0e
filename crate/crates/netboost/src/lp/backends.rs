//! Solver backends behind one narrow interface: load the program, solve,
//! report status and values. The default is a vertex (simplex) backend so
//! optimal points sit exactly on the binding constraints; an interior-point
//! backend and a small built-in simplex are alternatives. Whatever the
//! backend claims, `solve` re-checks the returned point against the stored
//! rows and demotes lying answers to `Error`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{simplex, LinearProgram, Sense, Solution, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// External sparse simplex (exact vertex solutions). Default.
    #[default]
    Microlp,
    /// External interior-point solver.
    Clarabel,
    /// Built-in dense two-phase simplex; fine for small programs.
    Builtin,
}

impl std::str::FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "microlp" => Ok(Backend::Microlp),
            "clarabel" => Ok(Backend::Clarabel),
            "builtin" => Ok(Backend::Builtin),
            other => Err(format!("unknown solver backend '{other}' (expected microlp, clarabel or builtin)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub backend: Backend,
    /// Largest tolerated constraint/bound violation in a returned point.
    pub feasibility_tol: f64,
    /// Re-check the returned point independently (on by default).
    pub verify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { backend: Backend::default(), feasibility_tol: 1e-6, verify: true }
    }
}

/// Solves `lp`, independently re-checks the answer, and recomputes the
/// objective from the stored coefficients.
pub fn solve(lp: &LinearProgram, opts: &SolveOptions) -> Solution {
    let raw = match opts.backend {
        Backend::Microlp => solve_microlp(lp),
        Backend::Clarabel => solve_clarabel(lp),
        Backend::Builtin => {
            let out = simplex::solve_dense(lp);
            match out.status {
                SolveStatus::Optimal => Ok(out.values),
                s => Err((s, out.message.unwrap_or_default())),
            }
        }
    };
    match raw {
        Err((status, message)) => Solution::failed(status, message),
        Ok(xs) => {
            let values: HashMap<String, f64> =
                lp.vars.iter().zip(&xs).map(|(v, &x)| (v.name.clone(), x)).collect();
            if opts.verify {
                match super::solution_violations(lp, &values) {
                    Err(e) => return Solution::failed(SolveStatus::Error, format!("backend returned incomplete point: {e}")),
                    Ok(rep) if rep.max_violation > opts.feasibility_tol => {
                        return Solution::failed(
                            SolveStatus::Error,
                            format!(
                                "backend point violates '{}' by {:.3e} (tolerance {:.1e})",
                                rep.worst.unwrap_or_default(),
                                rep.max_violation,
                                opts.feasibility_tol
                            ),
                        );
                    }
                    Ok(_) => {}
                }
            }
            let objective = lp.objective_value(&values).expect("values cover all variables");
            Solution { status: SolveStatus::Optimal, objective, values, duals: None, message: None }
        }
    }
}

type RawResult = Result<Vec<f64>, (SolveStatus, String)>;

fn solve_microlp(lp: &LinearProgram) -> RawResult {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<microlp::Variable> =
        lp.vars.iter().map(|v| problem.add_var(v.obj, (v.lb, v.ub))).collect();
    for c in &lp.cons {
        // empty rows are constant checks the backend may not accept
        if c.terms.is_empty() {
            let ok = match c.sense {
                Sense::Le => 0.0 <= c.rhs + 1e-12,
                Sense::Ge => 0.0 >= c.rhs - 1e-12,
                Sense::Eq => c.rhs.abs() <= 1e-12,
            };
            if ok {
                continue;
            }
            return Err((SolveStatus::Infeasible, format!("constraint '{}' has no variables and rhs {}", c.name, c.rhs)));
        }
        let op = match c.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Ge => ComparisonOp::Ge,
            Sense::Eq => ComparisonOp::Eq,
        };
        let expr: Vec<(microlp::Variable, f64)> = c.terms.iter().map(|&(v, coef)| (vars[v], coef)).collect();
        problem.add_constraint(expr, op, c.rhs);
    }
    match problem.solve() {
        Ok(sol) => Ok(vars.iter().map(|&v| sol[v]).collect()),
        Err(microlp::Error::Infeasible) => Err((SolveStatus::Infeasible, String::new())),
        Err(microlp::Error::Unbounded) => Err((SolveStatus::Unbounded, String::new())),
        Err(e) => Err((SolveStatus::Error, format!("microlp: {e}"))),
    }
}

fn solve_clarabel(lp: &LinearProgram) -> RawResult {
    use clarabel::algebra::CscMatrix;
    use clarabel::solver::{
        DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
    };

    let n = lp.vars.len();
    // rows: equalities first (zero cone), then all inequalities as a*x <= b
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = Vec::new();
    let mut n_eq = 0usize;
    let mut row = 0usize;
    for c in lp.cons.iter().filter(|c| c.sense == Sense::Eq) {
        for &(v, coef) in &c.terms {
            triplets.push((row, v, coef));
        }
        b.push(c.rhs);
        row += 1;
        n_eq += 1;
    }
    for c in lp.cons.iter().filter(|c| c.sense != Sense::Eq) {
        let flip = if c.sense == Sense::Ge { -1.0 } else { 1.0 };
        for &(v, coef) in &c.terms {
            triplets.push((row, v, flip * coef));
        }
        b.push(flip * c.rhs);
        row += 1;
    }
    for (v, def) in lp.vars.iter().enumerate() {
        if def.ub.is_finite() {
            triplets.push((row, v, 1.0));
            b.push(def.ub);
            row += 1;
        }
        if def.lb.is_finite() {
            triplets.push((row, v, -1.0));
            b.push(-def.lb);
            row += 1;
        }
    }
    let n_ineq = row - n_eq;

    // CSC assembly: column-major with sorted row indices
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, c, v) in triplets {
        by_col[c].push((r, v));
    }
    let mut colptr = Vec::with_capacity(n + 1);
    let mut rowval = Vec::new();
    let mut nzval = Vec::new();
    colptr.push(0);
    for col in &mut by_col {
        col.sort_unstable_by_key(|&(r, _)| r);
        for &(r, v) in col.iter() {
            rowval.push(r);
            nzval.push(v);
        }
        colptr.push(rowval.len());
    }
    let a = CscMatrix::new(row, n, colptr, rowval, nzval);
    let p = CscMatrix::zeros((n, n));
    let q: Vec<f64> = lp.vars.iter().map(|v| v.obj).collect();
    let cones: Vec<SupportedConeT<f64>> = vec![
        SupportedConeT::ZeroConeT(n_eq),
        SupportedConeT::NonnegativeConeT(n_ineq),
    ];
    let settings = DefaultSettings { verbose: false, ..Default::default() };
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings);
    solver.solve();
    match solver.solution.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => Ok(solver.solution.x.clone()),
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            Err((SolveStatus::Infeasible, String::new()))
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            Err((SolveStatus::Unbounded, String::new()))
        }
        other => Err((SolveStatus::Error, format!("clarabel: {other:?}"))),
    }
}
