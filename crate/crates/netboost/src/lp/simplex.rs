//! Built-in dense two-phase simplex. Intended for small programs (tests,
//! fallback when no external backend is wanted); the planning models default
//! to an external backend. Bland's rule kicks in after a stall, so cycling
//! terminates.

use super::{LinearProgram, Sense, SolveStatus};

pub(crate) struct SimplexOutcome {
    pub status: SolveStatus,
    /// One value per original variable, in registration order (Optimal only).
    pub values: Vec<f64>,
    pub message: Option<String>,
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const MAX_ITER: usize = 200_000;
const STALL_LIMIT: usize = 64;

enum ColMap {
    Fixed(f64),
    /// x = lb + y[col]
    Shift { col: usize, lb: f64 },
    /// x = ub - y[col]
    Flip { col: usize, ub: f64 },
    /// x = y[pos] - y[neg]
    Split { pos: usize, neg: usize },
}

pub(crate) fn solve_dense(lp: &LinearProgram) -> SimplexOutcome {
    // 1. substitute bounds so every working column is >= 0
    let mut maps = Vec::with_capacity(lp.vars.len());
    let mut ncols = 0usize;
    let mut ub_rows: Vec<(usize, f64)> = Vec::new(); // (col, upper) for doubly bounded vars
    for v in &lp.vars {
        let (lb, ub) = (v.lb, v.ub);
        if lb == ub {
            maps.push(ColMap::Fixed(lb));
        } else if lb.is_finite() {
            let col = ncols;
            ncols += 1;
            if ub.is_finite() {
                ub_rows.push((col, ub - lb));
            }
            maps.push(ColMap::Shift { col, lb });
        } else if ub.is_finite() {
            let col = ncols;
            ncols += 1;
            maps.push(ColMap::Flip { col, ub });
        } else {
            let (pos, neg) = (ncols, ncols + 1);
            ncols += 2;
            maps.push(ColMap::Split { pos, neg });
        }
    }

    // objective over working columns
    let mut cost = vec![0.0; ncols];
    for (v, map) in lp.vars.iter().zip(&maps) {
        match *map {
            ColMap::Fixed(_) => {}
            ColMap::Shift { col, .. } => cost[col] += v.obj,
            ColMap::Flip { col, .. } => cost[col] -= v.obj,
            ColMap::Split { pos, neg } => {
                cost[pos] += v.obj;
                cost[neg] -= v.obj;
            }
        }
    }

    // 2. rows with substituted constants, rhs made nonnegative
    struct Row {
        coefs: Vec<f64>,
        sense: Sense,
        rhs: f64,
    }
    let mut rows = Vec::with_capacity(lp.cons.len() + ub_rows.len());
    for c in &lp.cons {
        let mut coefs = vec![0.0; ncols];
        let mut rhs = c.rhs;
        for &(vi, coef) in &c.terms {
            match maps[vi] {
                ColMap::Fixed(x) => rhs -= coef * x,
                ColMap::Shift { col, lb } => {
                    coefs[col] += coef;
                    rhs -= coef * lb;
                }
                ColMap::Flip { col, ub } => {
                    coefs[col] -= coef;
                    rhs -= coef * ub;
                }
                ColMap::Split { pos, neg } => {
                    coefs[pos] += coef;
                    coefs[neg] -= coef;
                }
            }
        }
        let mut sense = c.sense;
        if rhs < 0.0 {
            for x in &mut coefs {
                *x = -*x;
            }
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        // rows that lost every column are pure feasibility checks
        if coefs.iter().all(|&x| x == 0.0) {
            let ok = match sense {
                Sense::Le => 0.0 <= rhs + 1e-9,
                Sense::Ge => 0.0 >= rhs - 1e-9,
                Sense::Eq => rhs.abs() <= 1e-9,
            };
            if ok {
                continue;
            }
            return SimplexOutcome {
                status: SolveStatus::Infeasible,
                values: vec![],
                message: Some(format!("constraint '{}' is unsatisfiable after fixing variables", c.name)),
            };
        }
        rows.push(Row { coefs, sense, rhs });
    }
    for (col, ub) in ub_rows {
        let mut coefs = vec![0.0; ncols];
        coefs[col] = 1.0;
        rows.push(Row { coefs, sense: Sense::Le, rhs: ub });
    }

    let m = rows.len();
    if m == 0 {
        // unconstrained: each working column sits at 0; unbounded if any cost < 0
        if cost.iter().any(|&c| c < -COST_TOL) {
            return SimplexOutcome { status: SolveStatus::Unbounded, values: vec![], message: None };
        }
        return SimplexOutcome { status: SolveStatus::Optimal, values: recover(&maps, &[]), message: None };
    }

    // 3. tableau: working cols | slack/artificial cols | rhs
    let mut slack_cols = 0usize;
    let mut art_cols = 0usize;
    for r in &rows {
        match r.sense {
            Sense::Le => slack_cols += 1,
            Sense::Ge => {
                slack_cols += 1;
                art_cols += 1;
            }
            Sense::Eq => art_cols += 1,
        }
    }
    let total = ncols + slack_cols + art_cols;
    let rhs_col = total;
    let art_start = ncols + slack_cols;
    let mut t = vec![vec![0.0; total + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut next_slack = ncols;
    let mut next_art = art_start;
    for (i, r) in rows.iter().enumerate() {
        t[i][..ncols].copy_from_slice(&r.coefs);
        t[i][rhs_col] = r.rhs;
        match r.sense {
            Sense::Le => {
                t[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                t[i][next_slack] = -1.0;
                next_slack += 1;
                t[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                t[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    // phase-1 cost row: minimize sum of artificials, reduced for the start basis
    let mut c1 = vec![0.0; total + 1];
    for j in art_start..total {
        c1[j] = 1.0;
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= art_start {
            for j in 0..=total {
                c1[j] -= t[i][j];
            }
        }
    }

    let is_artificial = |j: usize| j >= art_start;
    match run_phase(&mut t, &mut basis, &mut c1, total, rhs_col, &|_| false) {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => unreachable!("phase 1 objective is bounded below"),
        PhaseEnd::IterationLimit => {
            return SimplexOutcome { status: SolveStatus::Error, values: vec![], message: Some("simplex iteration limit in phase 1".into()) }
        }
    }
    let scale = rows.iter().fold(1.0f64, |s, r| s.max(r.rhs.abs()));
    if -c1[rhs_col] > 1e-7 * scale {
        return SimplexOutcome { status: SolveStatus::Infeasible, values: vec![], message: None };
    }

    // drive leftover artificials out of the basis where possible
    for i in 0..m {
        if is_artificial(basis[i]) {
            if let Some(j) = (0..art_start).find(|&j| t[i][j].abs() > PIVOT_TOL) {
                pivot_with_cost(&mut t, &mut basis, i, j, rhs_col, &mut c1);
            }
        }
    }

    // phase-2 cost row reduced for the current basis
    let mut c2 = vec![0.0; total + 1];
    c2[..ncols].copy_from_slice(&cost);
    for (i, &b) in basis.iter().enumerate() {
        let cb = c2[b];
        if cb != 0.0 {
            for j in 0..=total {
                c2[j] -= cb * t[i][j];
            }
        }
    }
    match run_phase(&mut t, &mut basis, &mut c2, total, rhs_col, &is_artificial) {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => return SimplexOutcome { status: SolveStatus::Unbounded, values: vec![], message: None },
        PhaseEnd::IterationLimit => {
            return SimplexOutcome { status: SolveStatus::Error, values: vec![], message: Some("simplex iteration limit in phase 2".into()) }
        }
    }

    let mut y = vec![0.0; ncols];
    for (i, &b) in basis.iter().enumerate() {
        if b < ncols {
            y[b] = t[i][rhs_col];
        }
    }
    SimplexOutcome { status: SolveStatus::Optimal, values: recover(&maps, &y), message: None }
}

fn recover(maps: &[ColMap], y: &[f64]) -> Vec<f64> {
    let get = |c: usize| if c < y.len() { y[c] } else { 0.0 };
    maps.iter()
        .map(|m| match *m {
            ColMap::Fixed(x) => x,
            ColMap::Shift { col, lb } => lb + get(col),
            ColMap::Flip { col, ub } => ub - get(col),
            ColMap::Split { pos, neg } => get(pos) - get(neg),
        })
        .collect()
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Runs simplex iterations on (t, basis) against the reduced cost row `c`.
/// `banned` columns never enter (artificials in phase 2).
fn run_phase(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    c: &mut [f64],
    total: usize,
    rhs_col: usize,
    banned: &dyn Fn(usize) -> bool,
) -> PhaseEnd {
    let mut stall = 0usize;
    let mut last_obj = -c[rhs_col];
    for _ in 0..MAX_ITER {
        let bland = stall >= STALL_LIMIT;
        let entering = if bland {
            (0..total).find(|&j| !banned(j) && c[j] < -COST_TOL)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..total {
                if !banned(j) && c[j] < -COST_TOL && best.map_or(true, |(_, bc)| c[j] < bc) {
                    best = Some((j, c[j]));
                }
            }
            best.map(|(j, _)| j)
        };
        let Some(j) = entering else { return PhaseEnd::Optimal };

        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j] > PIVOT_TOL {
                let ratio = row[rhs_col] / row[j];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-12 || (ratio < lr + 1e-12 && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else { return PhaseEnd::Unbounded };

        pivot_with_cost(t, basis, i, j, rhs_col, c);
        let obj = -c[rhs_col];
        if (last_obj - obj).abs() <= 1e-12 * (1.0 + obj.abs()) {
            stall += 1;
        } else {
            stall = 0;
            last_obj = obj;
        }
    }
    PhaseEnd::IterationLimit
}

fn pivot_with_cost(t: &mut [Vec<f64>], basis: &mut [usize], i: usize, j: usize, rhs_col: usize, c: &mut [f64]) {
    let piv = t[i][j];
    for x in t[i].iter_mut() {
        *x /= piv;
    }
    let pivot_row = t[i].clone();
    for (r, row) in t.iter_mut().enumerate() {
        if r == i || row[j] == 0.0 {
            continue;
        }
        let factor = row[j];
        for col in 0..=rhs_col {
            row[col] -= factor * pivot_row[col];
        }
        row[j] = 0.0;
    }
    let factor = c[j];
    if factor != 0.0 {
        for col in 0..=rhs_col {
            c[col] -= factor * pivot_row[col];
        }
        c[j] = 0.0;
    }
    basis[i] = j;
}
