//! Independent post-solve audit. Every constraint family of the planning
//! models is re-evaluated from the plan values, the network data and freshly
//! computed sensitivities; nothing is taken from the solver beyond the
//! solution point itself.

use rayon::prelude::*;

use crate::network::Network;
use crate::sensitivity::SensitivitySet;

use super::{PlanResult, PlanningError, ScenarioConfig};

/// One audited constraint family.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_violation: f64,
    /// Where the worst violation (or tightest margin) sits.
    pub worst: String,
    pub pass: bool,
}

/// The full audit. A plan is valid when every check passes at the
/// feasibility tolerance it was solved under.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub tolerance: f64,
    /// Buses carrying both upward and downward booster capacity. Nothing
    /// forbids this, so it is a diagnostic, not a violation.
    pub dual_capacity_buses: Vec<String>,
}

impl VerificationReport {
    pub fn valid(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// Plain-text table, one row per check.
    pub fn render(&self) -> String {
        let mut out = format!("{:<22} {:<6} {:>12}  worst at\n", "check", "status", "violation");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<22} {:<6} {:>12.3e}  {}\n",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.max_violation,
                c.worst
            ));
        }
        if !self.dual_capacity_buses.is_empty() {
            out.push_str(&format!(
                "note: both booster directions installed at {}\n",
                self.dual_capacity_buses.join(", ")
            ));
        }
        out
    }
}

/// Running maximum with a location label.
#[derive(Clone)]
struct Worst {
    v: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst { v: 0.0, at: "-".into() }
    }

    fn track(&mut self, v: f64, at: impl FnOnce() -> String) {
        if v > self.v {
            self.v = v;
            self.at = at();
        }
    }

    fn merge(self, other: Worst) -> Worst {
        if other.v > self.v {
            other
        } else {
            self
        }
    }

    fn into_check(self, name: &'static str, tol: f64) -> CheckResult {
        CheckResult { name, max_violation: self.v, worst: self.at, pass: self.v <= tol }
    }
}

/// Audits a plan against the network and scenario it was solved for.
/// Violations never error; they land in the report. Booster checks appear
/// only for models that carry boosters.
pub fn verify_plan(
    plan: &PlanResult,
    net: &Network,
    cfg: &ScenarioConfig,
) -> Result<VerificationReport, PlanningError> {
    let sens = SensitivitySet::compute(net, cfg.slack_bus_id(net))?;
    let tol = cfg.feasibility_tol;
    let cont: Vec<usize> = plan
        .contingencies
        .iter()
        .map(|id| {
            net.line_index(id).ok_or_else(|| PlanningError::UnknownContingency(id.clone()))
        })
        .collect::<Result<_, _>>()?;
    let nt = net.n_snapshots();
    let label = |t: usize| net.snapshots[t].label.as_str();
    let mut checks = Vec::new();

    let mut w = Worst::new();
    for t in 0..nt {
        for (i, bus) in net.buses.iter().enumerate() {
            let gen: f64 = net.generators_at(i).iter().map(|&s| plan.dispatch[t][s]).sum();
            let mut outflow = 0.0;
            for l in 0..net.n_lines() {
                let (u, v) = net.line_ends(l);
                if u == i {
                    outflow += plan.line_flow[t][l];
                } else if v == i {
                    outflow -= plan.line_flow[t][l];
                }
            }
            let residual = gen - net.demand(i, t) - outflow;
            w.track(residual.abs(), || format!("bus {}, snapshot {}", bus.id, label(t)));
        }
    }
    checks.push(w.into_check("nodal_balance", tol));

    let mut w = Worst::new();
    for t in 0..nt {
        for (l, line) in net.lines.iter().enumerate() {
            let (u, v) = net.line_ends(l);
            let implied = (plan.angles[t][u] - plan.angles[t][v]) / line.reactance;
            w.track((plan.line_flow[t][l] - implied).abs(), || {
                format!("line {}, snapshot {}", line.id, label(t))
            });
        }
    }
    checks.push(w.into_check("kvl_angles", tol));

    let mut w = Worst::new();
    for t in 0..nt {
        let inj = net.injections(&plan.dispatch[t], t);
        for (l, line) in net.lines.iter().enumerate() {
            let implied: f64 = (0..net.n_buses()).map(|i| sens.ptdf[(l, i)] * inj[i]).sum();
            w.track((plan.line_flow[t][l] - implied).abs(), || {
                format!("line {}, snapshot {}", line.id, label(t))
            });
        }
    }
    checks.push(w.into_check("flow_vs_injections", tol));

    let mut w = Worst::new();
    for t in 0..nt {
        for (l, line) in net.lines.iter().enumerate() {
            w.track(plan.line_flow[t][l].abs() - line.patl, || {
                format!("line {}, snapshot {}", line.id, label(t))
            });
        }
    }
    checks.push(w.into_check("patl_base", tol));

    // (snapshot, position in the contingency list, line index of the outage)
    let pairs: Vec<(usize, usize, usize)> = (0..nt)
        .flat_map(|t| cont.iter().enumerate().map(move |(ki, &k)| (t, ki, k)))
        .collect();

    let w = pairs
        .par_iter()
        .map(|&(t, _, k)| {
            let mut w = Worst::new();
            for (l, line) in net.lines.iter().enumerate() {
                if l == k {
                    continue;
                }
                let post = plan.line_flow[t][l] + sens.lodf[(l, k)] * plan.line_flow[t][k];
                w.track(post.abs() - cfg.tatl_factor * line.patl, || {
                    format!(
                        "line {} after outage {}, snapshot {}",
                        line.id,
                        net.lines[k].id,
                        label(t)
                    )
                });
            }
            w
        })
        .reduce(Worst::new, Worst::merge);
    checks.push(w.into_check("tatl_post_outage", tol));

    if plan.has_boosters() {
        let w = pairs
            .par_iter()
            .map(|&(t, ki, k)| {
                let mut w = Worst::new();
                let up = &plan.nb_dispatch_up[t][ki];
                let dn = &plan.nb_dispatch_down[t][ki];
                for (l, line) in net.lines.iter().enumerate() {
                    if l == k {
                        continue;
                    }
                    let lodf = sens.lodf[(l, k)];
                    let mut corrected =
                        plan.line_flow[t][l] + lodf * plan.line_flow[t][k];
                    for i in 0..net.n_buses() {
                        let coef = sens.ptdf[(l, i)] + lodf * sens.ptdf[(k, i)];
                        corrected += coef * (up[i] - dn[i]);
                    }
                    w.track(corrected.abs() - line.patl, || {
                        format!(
                            "line {} after outage {}, snapshot {}",
                            line.id,
                            net.lines[k].id,
                            label(t)
                        )
                    });
                }
                w
            })
            .reduce(Worst::new, Worst::merge);
        checks.push(w.into_check("corrected_patl", tol));

        let mut w = Worst::new();
        for t in 0..nt {
            for (ki, kid) in plan.contingencies.iter().enumerate() {
                let net_power: f64 = (0..net.n_buses())
                    .map(|i| plan.nb_dispatch_up[t][ki][i] - plan.nb_dispatch_down[t][ki][i])
                    .sum();
                w.track(net_power.abs(), || {
                    format!("outage {kid}, snapshot {}", label(t))
                });
            }
        }
        checks.push(w.into_check("nb_balance", tol));
    }

    let mut w = Worst::new();
    for (s, g) in net.generators.iter().enumerate() {
        let cap = plan.generator_capacity[s];
        let v = if g.extendable {
            (-cap).max(cap - g.max_capacity)
        } else {
            (cap - g.max_capacity).abs()
        };
        w.track(v, || format!("capacity of {}", g.id));
        for t in 0..nt {
            let d = plan.dispatch[t][s];
            let v = (-d).max(d - net.availability_of(s, t) * cap);
            w.track(v, || format!("dispatch of {}, snapshot {}", g.id, label(t)));
        }
    }
    if plan.has_boosters() {
        for (i, bus) in net.buses.iter().enumerate() {
            w.track(-plan.nb_capacity_up[i], || format!("booster capacity up at {}", bus.id));
            w.track(-plan.nb_capacity_down[i], || {
                format!("booster capacity down at {}", bus.id)
            });
            for t in 0..nt {
                for (ki, kid) in plan.contingencies.iter().enumerate() {
                    let up = plan.nb_dispatch_up[t][ki][i];
                    let dn = plan.nb_dispatch_down[t][ki][i];
                    let v = (-up)
                        .max(up - plan.nb_capacity_up[i])
                        .max(-dn)
                        .max(dn - plan.nb_capacity_down[i]);
                    w.track(v, || {
                        format!("booster at {}, snapshot {}, outage {kid}", bus.id, label(t))
                    });
                }
            }
        }
    }
    checks.push(w.into_check("dispatch_bounds", tol));

    let cap = cfg.resolved_co2_cap()?;
    let emitted: f64 = (0..nt)
        .map(|t| {
            let wgt = net.weight(t);
            net.generators
                .iter()
                .enumerate()
                .map(|(s, g)| wgt * g.emission_factor / g.efficiency * plan.dispatch[t][s])
                .sum::<f64>()
        })
        .sum();
    let mut w = Worst::new();
    w.track(emitted - cap, || format!("emissions {emitted:.1} vs cap {cap:.1}"));
    checks.push(w.into_check("co2_cap", tol));

    let dual_capacity_buses = if plan.has_boosters() {
        net.buses
            .iter()
            .enumerate()
            .filter(|&(i, _)| {
                plan.nb_capacity_up[i].min(plan.nb_capacity_down[i]) > tol
            })
            .map(|(_, b)| b.id.clone())
            .collect()
    } else {
        vec![]
    };

    Ok(VerificationReport { checks, tolerance: tol, dual_capacity_buses })
}
