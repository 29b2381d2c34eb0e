//! LP construction and solution extraction for the three planning models.
//!
//! Naming scheme (snapshot positions, not labels, so names stay
//! format-safe): variables `gcap/{gen}`, `gdisp/{gen}/{t}`, `flow/{line}/{t}`,
//! `angle/{bus}/{t}`, `nbcap_up/{bus}`, `nbcap_dn/{bus}`, `nb_up/{bus}/{t}/{k}`,
//! `nb_dn/{bus}/{t}/{k}`; constraints `balance/{bus}/{t}`, `kvl/{line}/{t}`,
//! `gen_avail/{gen}/{t}`, `patl/{line}/{t}/hi|lo`, `co2`,
//! `tatl/{t}/{k}/{l}/hi|lo`, `nb_up_lim/{bus}/{t}/{k}`,
//! `nb_dn_lim/{bus}/{t}/{k}`, `nb_bal/{t}/{k}`, `corr/{t}/{k}/{l}/hi|lo`.

use std::collections::HashMap;

use crate::lp::{LinearProgram, Sense, VarId};
use crate::network::Network;
use crate::sensitivity::SensitivitySet;

use super::{CostReport, ModelKind, PlanResult, PlanningError, ScenarioConfig};

/// An LP plus the outage list its security rows cover, in row order.
#[derive(Debug)]
pub struct BuiltModel {
    pub lp: LinearProgram,
    /// Outage line ids.
    pub contingencies: Vec<String>,
}

/// Maps the configured contingency list (or the all-non-bridge default) to
/// line indices, rejecting unknown lines and bridges.
fn resolve_contingencies(
    net: &Network,
    sens: &SensitivitySet,
    cfg: &ScenarioConfig,
) -> Result<Vec<usize>, PlanningError> {
    match &cfg.contingencies {
        Some(ids) => ids
            .iter()
            .map(|id| {
                let l = net
                    .line_index(id)
                    .ok_or_else(|| PlanningError::UnknownContingency(id.clone()))?;
                if sens.is_bridge(l) {
                    return Err(PlanningError::BridgeContingency(id.clone()));
                }
                Ok(l)
            })
            .collect(),
        None => {
            for line in &net.lines {
                if sens.bridges.contains(&line.id) {
                    log::warn!(
                        "line {} is a bridge and is excluded from the default contingency set",
                        line.id
                    );
                }
            }
            Ok((0..net.n_lines()).filter(|&l| !sens.is_bridge(l)).collect())
        }
    }
}

/// Adds generation capacities, dispatch, flows and angles with nodal
/// balance, flow physics (flows tied to angle differences, reference angle
/// fixed to zero), availability limits, permanent ratings and the emission
/// cap. Operating cost and emissions carry the snapshot weights. Returns the
/// flow variables `[t][line]`, the only family later rows couple to.
fn add_investment_block(
    lp: &mut LinearProgram,
    net: &Network,
    cfg: &ScenarioConfig,
    slack: usize,
) -> Result<Vec<Vec<VarId>>, PlanningError> {
    let nt = net.n_snapshots();
    let gcap: Vec<VarId> = net
        .generators
        .iter()
        .map(|g| {
            let (lb, ub) =
                if g.extendable { (0.0, g.max_capacity) } else { (g.max_capacity, g.max_capacity) };
            lp.add_variable(&format!("gcap/{}", g.id), lb, ub, g.capital_cost)
        })
        .collect::<Result<_, _>>()?;
    let mut gdisp = Vec::with_capacity(nt);
    let mut flow = Vec::with_capacity(nt);
    let mut angle = Vec::with_capacity(nt);
    for t in 0..nt {
        let w = net.weight(t);
        gdisp.push(
            net.generators
                .iter()
                .map(|g| {
                    lp.add_variable(
                        &format!("gdisp/{}/{t}", g.id),
                        0.0,
                        f64::INFINITY,
                        w * g.marginal_cost,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
        flow.push(
            net.lines
                .iter()
                .map(|l| {
                    lp.add_variable(
                        &format!("flow/{}/{t}", l.id),
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
        angle.push(
            net.buses
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let (lb, ub) = if i == slack {
                        (0.0, 0.0)
                    } else {
                        (f64::NEG_INFINITY, f64::INFINITY)
                    };
                    lp.add_variable(&format!("angle/{}/{t}", b.id), lb, ub, 0.0)
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }

    for t in 0..nt {
        for (i, bus) in net.buses.iter().enumerate() {
            let mut terms: Vec<(VarId, f64)> =
                net.generators_at(i).iter().map(|&s| (gdisp[t][s], 1.0)).collect();
            for (l, _) in net.lines.iter().enumerate() {
                let (u, v) = net.line_ends(l);
                if u == i {
                    terms.push((flow[t][l], -1.0));
                } else if v == i {
                    terms.push((flow[t][l], 1.0));
                }
            }
            lp.add_constraint(
                &format!("balance/{}/{t}", bus.id),
                terms,
                Sense::Eq,
                net.demand(i, t),
            )?;
        }
        for (l, line) in net.lines.iter().enumerate() {
            let (u, v) = net.line_ends(l);
            let b = 1.0 / line.reactance;
            lp.add_constraint(
                &format!("kvl/{}/{t}", line.id),
                [(flow[t][l], 1.0), (angle[t][u], -b), (angle[t][v], b)],
                Sense::Eq,
                0.0,
            )?;
            lp.add_constraint(
                &format!("patl/{}/{t}/hi", line.id),
                [(flow[t][l], 1.0)],
                Sense::Le,
                line.patl,
            )?;
            lp.add_constraint(
                &format!("patl/{}/{t}/lo", line.id),
                [(flow[t][l], 1.0)],
                Sense::Ge,
                -line.patl,
            )?;
        }
        for (s, g) in net.generators.iter().enumerate() {
            lp.add_constraint(
                &format!("gen_avail/{}/{t}", g.id),
                [(gdisp[t][s], 1.0), (gcap[s], -net.availability_of(s, t))],
                Sense::Le,
                0.0,
            )?;
        }
    }

    let mut co2_terms = Vec::new();
    for t in 0..nt {
        let w = net.weight(t);
        for (s, g) in net.generators.iter().enumerate() {
            co2_terms.push((gdisp[t][s], w * g.emission_factor / g.efficiency));
        }
    }
    lp.add_constraint("co2", co2_terms, Sense::Le, cfg.resolved_co2_cap()?)?;

    Ok(flow)
}

/// Post-outage flow limits before any correction: for every snapshot, outage
/// k and surviving line l, the redistributed flow must stay within the
/// short-term rating `tatl_factor * patl`.
fn add_tatl_rows(
    lp: &mut LinearProgram,
    net: &Network,
    sens: &SensitivitySet,
    cont: &[usize],
    cfg: &ScenarioConfig,
    flow: &[Vec<VarId>],
) -> Result<(), PlanningError> {
    for t in 0..net.n_snapshots() {
        for &k in cont {
            let kid = &net.lines[k].id;
            for (l, line) in net.lines.iter().enumerate() {
                if l == k {
                    continue;
                }
                let lodf = sens.lodf[(l, k)];
                let limit = cfg.tatl_factor * line.patl;
                let terms = [(flow[t][l], 1.0), (flow[t][k], lodf)];
                lp.add_constraint(
                    &format!("tatl/{t}/{kid}/{}/hi", line.id),
                    terms,
                    Sense::Le,
                    limit,
                )?;
                lp.add_constraint(
                    &format!("tatl/{t}/{kid}/{}/lo", line.id),
                    terms,
                    Sense::Ge,
                    -limit,
                )?;
            }
        }
    }
    Ok(())
}

/// Booster dispatch variables `[t][k][bus]`; the per-bus capacity variables
/// and their limit rows are added alongside but later rows only couple to
/// dispatch.
struct BoosterVars {
    up: Vec<Vec<Vec<VarId>>>,
    dn: Vec<Vec<Vec<VarId>>>,
}

fn add_booster_block(
    lp: &mut LinearProgram,
    net: &Network,
    cont: &[usize],
    cfg: &ScenarioConfig,
) -> Result<BoosterVars, PlanningError> {
    let cap_up: Vec<VarId> = net
        .buses
        .iter()
        .map(|b| {
            lp.add_variable(&format!("nbcap_up/{}", b.id), 0.0, f64::INFINITY, cfg.nb_capital_cost_up)
        })
        .collect::<Result<_, _>>()?;
    let cap_dn: Vec<VarId> = net
        .buses
        .iter()
        .map(|b| {
            lp.add_variable(&format!("nbcap_dn/{}", b.id), 0.0, f64::INFINITY, cfg.nb_capital_cost_down)
        })
        .collect::<Result<_, _>>()?;
    let mut up = Vec::with_capacity(net.n_snapshots());
    let mut dn = Vec::with_capacity(net.n_snapshots());
    for t in 0..net.n_snapshots() {
        let mut up_t = Vec::with_capacity(cont.len());
        let mut dn_t = Vec::with_capacity(cont.len());
        for &k in cont {
            let kid = &net.lines[k].id;
            let up_tk: Vec<VarId> = net
                .buses
                .iter()
                .map(|b| {
                    lp.add_variable(
                        &format!("nb_up/{}/{t}/{kid}", b.id),
                        0.0,
                        f64::INFINITY,
                        cfg.nb_dispatch_cost_up,
                    )
                })
                .collect::<Result<_, _>>()?;
            let dn_tk: Vec<VarId> = net
                .buses
                .iter()
                .map(|b| {
                    lp.add_variable(
                        &format!("nb_dn/{}/{t}/{kid}", b.id),
                        0.0,
                        f64::INFINITY,
                        cfg.nb_dispatch_cost_down,
                    )
                })
                .collect::<Result<_, _>>()?;
            for (i, bus) in net.buses.iter().enumerate() {
                lp.add_constraint(
                    &format!("nb_up_lim/{}/{t}/{kid}", bus.id),
                    [(up_tk[i], 1.0), (cap_up[i], -1.0)],
                    Sense::Le,
                    0.0,
                )?;
                lp.add_constraint(
                    &format!("nb_dn_lim/{}/{t}/{kid}", bus.id),
                    [(dn_tk[i], 1.0), (cap_dn[i], -1.0)],
                    Sense::Le,
                    0.0,
                )?;
            }
            let mut bal: Vec<(VarId, f64)> = Vec::with_capacity(2 * net.n_buses());
            for i in 0..net.n_buses() {
                bal.push((up_tk[i], 1.0));
                bal.push((dn_tk[i], -1.0));
            }
            lp.add_constraint(&format!("nb_bal/{t}/{kid}"), bal, Sense::Eq, 0.0)?;
            up_t.push(up_tk);
            dn_t.push(dn_tk);
        }
        up.push(up_t);
        dn.push(dn_t);
    }
    Ok(BoosterVars { up, dn })
}

/// Coefficients below this are inversion noise, not physics; dropping them
/// keeps rows sparse and reproducible.
const COEF_NOISE_TOL: f64 = 1e-12;

/// Sensitivity of the corrected post-outage flow on line l (outage k) to a
/// net booster injection at each bus. The reference-bus entry is exactly
/// zero; balanced dispatch makes the reference choice immaterial.
fn correction_coefficients(sens: &SensitivitySet, l: usize, k: usize, n_buses: usize) -> Vec<f64> {
    let lodf = sens.lodf[(l, k)];
    (0..n_buses)
        .map(|i| {
            let c = sens.ptdf[(l, i)] + lodf * sens.ptdf[(k, i)];
            if c.abs() < COEF_NOISE_TOL {
                0.0
            } else {
                c
            }
        })
        .collect()
}

/// Generation investment LP. With `tatl_factor` = 1 the post-outage rows
/// enforce strict N-1 security; above 1 they allow the transient overloads a
/// later corrective stage must clear.
pub fn build_investment_lp(
    net: &Network,
    cfg: &ScenarioConfig,
) -> Result<BuiltModel, PlanningError> {
    cfg.validate()?;
    let sens = SensitivitySet::compute(net, cfg.slack_bus_id(net))?;
    let cont = resolve_contingencies(net, &sens, cfg)?;
    let slack = net.bus_index(cfg.slack_bus_id(net)).expect("sensitivities checked the slack id");
    let mut lp = LinearProgram::new("investment");
    let flow = add_investment_block(&mut lp, net, cfg, slack)?;
    add_tatl_rows(&mut lp, net, &sens, &cont, cfg, &flow)?;
    Ok(BuiltModel { lp, contingencies: cont.iter().map(|&k| net.lines[k].id.clone()).collect() })
}

/// Booster placement against fixed flows (`fixed_flows[t][l]` in MW). The
/// flows are first checked against the short-term rating they were planned
/// under; corrected post-outage flows must then return within the permanent
/// rating, with the fixed part folded into the right-hand side.
pub fn build_nb_placement_lp(
    net: &Network,
    fixed_flows: &[Vec<f64>],
    cfg: &ScenarioConfig,
) -> Result<BuiltModel, PlanningError> {
    cfg.validate()?;
    let sens = SensitivitySet::compute(net, cfg.slack_bus_id(net))?;
    let cont = resolve_contingencies(net, &sens, cfg)?;
    assert_eq!(fixed_flows.len(), net.n_snapshots(), "one flow row per snapshot");

    for (t, row) in fixed_flows.iter().enumerate() {
        assert_eq!(row.len(), net.n_lines(), "one flow per line");
        for &k in &cont {
            for (l, line) in net.lines.iter().enumerate() {
                if l == k {
                    continue;
                }
                let post = row[l] + sens.lodf[(l, k)] * row[k];
                let excess = post.abs() - cfg.tatl_factor * line.patl;
                if excess > cfg.feasibility_tol {
                    return Err(PlanningError::StageOneViolation {
                        snapshot: t,
                        outage: net.lines[k].id.clone(),
                        line: line.id.clone(),
                        excess,
                    });
                }
            }
        }
    }

    let mut lp = LinearProgram::new("booster_placement");
    let nb = add_booster_block(&mut lp, net, &cont, cfg)?;
    for (t, row) in fixed_flows.iter().enumerate() {
        for (ki, &k) in cont.iter().enumerate() {
            let kid = &net.lines[k].id;
            for (l, line) in net.lines.iter().enumerate() {
                if l == k {
                    continue;
                }
                let post = row[l] + sens.lodf[(l, k)] * row[k];
                let coef = correction_coefficients(&sens, l, k, net.n_buses());
                let mut terms = Vec::with_capacity(2 * net.n_buses());
                for i in 0..net.n_buses() {
                    terms.push((nb.up[t][ki][i], coef[i]));
                    terms.push((nb.dn[t][ki][i], -coef[i]));
                }
                lp.add_constraint(
                    &format!("corr/{t}/{kid}/{}/hi", line.id),
                    terms.clone(),
                    Sense::Le,
                    line.patl - post,
                )?;
                lp.add_constraint(
                    &format!("corr/{t}/{kid}/{}/lo", line.id),
                    terms,
                    Sense::Ge,
                    -line.patl - post,
                )?;
            }
        }
    }
    Ok(BuiltModel { lp, contingencies: cont.iter().map(|&k| net.lines[k].id.clone()).collect() })
}

/// The combined LP: all investment-stage rows, all booster rows, and
/// corrected post-outage rows in which the flows are decision variables.
pub fn build_simultaneous_lp(
    net: &Network,
    cfg: &ScenarioConfig,
) -> Result<BuiltModel, PlanningError> {
    cfg.validate()?;
    let sens = SensitivitySet::compute(net, cfg.slack_bus_id(net))?;
    let cont = resolve_contingencies(net, &sens, cfg)?;
    let slack = net.bus_index(cfg.slack_bus_id(net)).expect("sensitivities checked the slack id");
    let mut lp = LinearProgram::new("combined");
    let flow = add_investment_block(&mut lp, net, cfg, slack)?;
    add_tatl_rows(&mut lp, net, &sens, &cont, cfg, &flow)?;
    let nb = add_booster_block(&mut lp, net, &cont, cfg)?;
    for t in 0..net.n_snapshots() {
        for (ki, &k) in cont.iter().enumerate() {
            let kid = &net.lines[k].id;
            for (l, line) in net.lines.iter().enumerate() {
                if l == k {
                    continue;
                }
                let coef = correction_coefficients(&sens, l, k, net.n_buses());
                let mut terms = vec![(flow[t][l], 1.0), (flow[t][k], sens.lodf[(l, k)])];
                for i in 0..net.n_buses() {
                    terms.push((nb.up[t][ki][i], coef[i]));
                    terms.push((nb.dn[t][ki][i], -coef[i]));
                }
                lp.add_constraint(
                    &format!("corr/{t}/{kid}/{}/hi", line.id),
                    terms.clone(),
                    Sense::Le,
                    line.patl,
                )?;
                lp.add_constraint(
                    &format!("corr/{t}/{kid}/{}/lo", line.id),
                    terms,
                    Sense::Ge,
                    -line.patl,
                )?;
            }
        }
    }
    Ok(BuiltModel { lp, contingencies: cont.iter().map(|&k| net.lines[k].id.clone()).collect() })
}

fn lookup(values: &HashMap<String, f64>, name: String) -> Result<f64, PlanningError> {
    values.get(&name).copied().ok_or(PlanningError::MissingVariable(name))
}

/// Reads the `flow/{line}/{t}` family out of a solved value map.
pub(super) fn flows_from_values(
    values: &HashMap<String, f64>,
    net: &Network,
) -> Result<Vec<Vec<f64>>, PlanningError> {
    (0..net.n_snapshots())
        .map(|t| {
            net.lines.iter().map(|l| lookup(values, format!("flow/{}/{t}", l.id))).collect()
        })
        .collect()
}

/// Maps solved values back to a plan and re-costs it from the scenario data
/// rather than trusting the solver's reported objective. `values` must hold
/// every variable the model kind implies (both stages' values for the
/// sequential model).
pub fn extract_plan(
    values: &HashMap<String, f64>,
    net: &Network,
    cfg: &ScenarioConfig,
    kind: ModelKind,
    contingencies: &[String],
) -> Result<PlanResult, PlanningError> {
    let nt = net.n_snapshots();
    let generator_capacity: Vec<f64> = net
        .generators
        .iter()
        .map(|g| lookup(values, format!("gcap/{}", g.id)))
        .collect::<Result<_, _>>()?;
    let dispatch: Vec<Vec<f64>> = (0..nt)
        .map(|t| {
            net.generators
                .iter()
                .map(|g| lookup(values, format!("gdisp/{}/{t}", g.id)))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let line_flow = flows_from_values(values, net)?;
    let angles: Vec<Vec<f64>> = (0..nt)
        .map(|t| {
            net.buses.iter().map(|b| lookup(values, format!("angle/{}/{t}", b.id))).collect()
        })
        .collect::<Result<_, _>>()?;

    let has_nb = kind != ModelKind::Preventive;
    let (nb_capacity_up, nb_capacity_down) = if has_nb {
        (
            net.buses
                .iter()
                .map(|b| lookup(values, format!("nbcap_up/{}", b.id)))
                .collect::<Result<Vec<_>, _>>()?,
            net.buses
                .iter()
                .map(|b| lookup(values, format!("nbcap_dn/{}", b.id)))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        (vec![], vec![])
    };
    let mut nb_dispatch_up = Vec::new();
    let mut nb_dispatch_down = Vec::new();
    if has_nb {
        for t in 0..nt {
            let mut up_t = Vec::with_capacity(contingencies.len());
            let mut dn_t = Vec::with_capacity(contingencies.len());
            for kid in contingencies {
                up_t.push(
                    net.buses
                        .iter()
                        .map(|b| lookup(values, format!("nb_up/{}/{t}/{kid}", b.id)))
                        .collect::<Result<Vec<_>, _>>()?,
                );
                dn_t.push(
                    net.buses
                        .iter()
                        .map(|b| lookup(values, format!("nb_dn/{}/{t}/{kid}", b.id)))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            nb_dispatch_up.push(up_t);
            nb_dispatch_down.push(dn_t);
        }
    }

    let capital_generation: f64 = net
        .generators
        .iter()
        .zip(&generator_capacity)
        .map(|(g, cap)| g.capital_cost * cap)
        .sum();
    let operation_generation: f64 = (0..nt)
        .map(|t| {
            let w = net.weight(t);
            net.generators
                .iter()
                .enumerate()
                .map(|(s, g)| w * g.marginal_cost * dispatch[t][s])
                .sum::<f64>()
        })
        .sum();
    // + 0.0 turns the empty-sum identity -0.0 into a plain 0 for NB-free plans.
    let nb_capital: f64 = nb_capacity_up.iter().map(|p| cfg.nb_capital_cost_up * p).sum::<f64>()
        + nb_capacity_down.iter().map(|p| cfg.nb_capital_cost_down * p).sum::<f64>()
        + 0.0;
    let nb_operation: f64 = nb_dispatch_up
        .iter()
        .flatten()
        .flatten()
        .map(|p| cfg.nb_dispatch_cost_up * p)
        .sum::<f64>()
        + nb_dispatch_down
            .iter()
            .flatten()
            .flatten()
            .map(|p| cfg.nb_dispatch_cost_down * p)
            .sum::<f64>()
        + 0.0;
    let total = capital_generation + operation_generation + nb_capital + nb_operation;

    Ok(PlanResult {
        model: kind,
        generator_capacity,
        dispatch,
        line_flow,
        angles,
        nb_capacity_up,
        nb_capacity_down,
        nb_dispatch_up,
        nb_dispatch_down,
        contingencies: contingencies.to_vec(),
        cost_report: CostReport {
            capital_generation,
            operation_generation,
            nb_capital,
            nb_operation,
            total,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::super::solve_plan;
    use super::*;
    use crate::lp::{solve, SolveStatus};
    use crate::network::{load_network, Bus, Generator, Line, Snapshot};
    use std::path::Path;

    fn fixture(name: &str) -> Network {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
        load_network(dir).unwrap()
    }

    fn triangle_cfg(model: ModelKind) -> ScenarioConfig {
        ScenarioConfig { model, co2_cap: Some(400_000.0), ..ScenarioConfig::default() }
    }

    fn terms_of<'a>(lp: &'a LinearProgram, name: &str) -> Vec<(&'a str, f64)> {
        let con = lp.cons.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("row {name}"));
        con.terms.iter().map(|&(v, coef)| (lp.vars[v].name.as_str(), coef)).collect()
    }

    #[test]
    fn tatl_rows_cover_every_outage_survivor_pair() {
        // 1 snapshot, 3 outages, 2 survivors each, 2 sides.
        let net = fixture("triangle");
        let built = build_investment_lp(&net, &triangle_cfg(ModelKind::Preventive)).unwrap();
        let tatl_rows =
            built.lp.constraint_names().filter(|n| n.starts_with("tatl/")).count();
        assert_eq!(tatl_rows, 12);
        // gcap 2 + gdisp 2 + flow 3 + angle 3
        assert_eq!(built.lp.n_variables(), 10);
        assert_eq!(built.contingencies, vec!["AB", "BC", "AC"]);
    }

    #[test]
    fn security_rows_inactive_when_post_outage_flows_fit() {
        let net = fixture("triangle_uncongested");
        let secured = solve_plan(&net, &triangle_cfg(ModelKind::Preventive)).unwrap();
        let unsecured = solve_plan(
            &net,
            &ScenarioConfig {
                contingencies: Some(vec![]),
                ..triangle_cfg(ModelKind::Preventive)
            },
        )
        .unwrap();
        let (a, b) = (secured.objective(), unsecured.objective());
        assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
        // Merit order: the whole 100 MW from the cheap generator, all year.
        assert!((b - 8.76e6).abs() <= 1e-6 * 8.76e6, "{b}");
    }

    #[test]
    fn zero_emission_cap_with_only_gas_blames_the_cap() {
        let buses = vec![
            Bus { id: "a".into(), name: None, x: None, y: None },
            Bus { id: "b".into(), name: None, x: None, y: None },
            Bus { id: "c".into(), name: None, x: None, y: None },
        ];
        let lines = vec![
            Line { id: "ab".into(), from_bus: "a".into(), to_bus: "b".into(), reactance: 1.0, patl: 500.0 },
            Line { id: "bc".into(), from_bus: "b".into(), to_bus: "c".into(), reactance: 1.0, patl: 500.0 },
            Line { id: "ca".into(), from_bus: "c".into(), to_bus: "a".into(), reactance: 1.0, patl: 500.0 },
        ];
        let gens = vec![Generator {
            id: "gas".into(),
            bus: "a".into(),
            capital_cost: 0.0,
            marginal_cost: 50.0,
            max_capacity: 300.0,
            emission_factor: 0.2,
            efficiency: 0.5,
            extendable: false,
        }];
        let net = Network::new(
            buses,
            lines,
            gens,
            vec![Snapshot { label: "h0".into(), weight: 8760.0 }],
            vec![vec![0.0, 100.0, 0.0]],
            vec![vec![1.0]],
            8760.0,
        )
        .unwrap();
        let cfg = ScenarioConfig {
            co2_cap: Some(0.0),
            ..triangle_cfg(ModelKind::Preventive)
        };
        let err = solve_plan(&net, &cfg).unwrap_err();
        match err {
            PlanningError::Infeasible { ref blamed, .. } => {
                assert_eq!(blamed[0].0, "co2", "blame list: {blamed:?}");
            }
            other => panic!("expected infeasibility, got {other}"),
        }
        let msg = err.to_string();
        assert!(msg.contains("co2"), "{msg}");
    }

    #[test]
    fn booster_pair_matches_hand_solution() {
        // Relaxed stage one sends the full 100 MW from the cheap generator,
        // loading AB to 100 after either AC or BC fails. The only dispatch
        // that lowers AB after losing AC is absorption at A (coefficient 1);
        // after losing BC, injection at B (coefficient -1). Each outage needs
        // 20 MW, balanced by the opposite booster, so capacities are P-(A) =
        // P+(B) = 20 with both dispatched in both outages.
        let net = fixture("triangle");
        let solved = solve_plan(&net, &triangle_cfg(ModelKind::Sequential)).unwrap();
        let plan = &solved.plan;
        let a = net.bus_index("A").unwrap();
        let b = net.bus_index("B").unwrap();
        let c = net.bus_index("C").unwrap();
        assert!((plan.nb_capacity_down[a] - 20.0).abs() < 1e-6, "{:?}", plan.nb_capacity_down);
        assert!((plan.nb_capacity_up[b] - 20.0).abs() < 1e-6, "{:?}", plan.nb_capacity_up);
        for i in [b, c] {
            assert!(plan.nb_capacity_down[i].abs() < 1e-6);
        }
        for i in [a, c] {
            assert!(plan.nb_capacity_up[i].abs() < 1e-6);
        }
        // 2 x 23000 EUR/MW/a x 20 MW capital, 80 MW dispatched at 0.01.
        let stage2 = solved.stages[1].solution.objective;
        assert!((stage2 - 920_000.8).abs() <= 1e-9 * 920_000.8, "{stage2}");
        let total = plan.cost_report.total;
        assert!((total - (8.76e6 + 920_000.8)).abs() <= 1e-8 * total, "{total}");
    }

    #[test]
    fn single_outage_booster_sizing_is_exact() {
        let net = fixture("triangle");
        let cfg = ScenarioConfig {
            contingencies: Some(vec!["AC".into()]),
            ..triangle_cfg(ModelKind::Sequential)
        };
        let solved = solve_plan(&net, &cfg).unwrap();
        let plan = &solved.plan;
        let (up, dn) = plan.total_nb_capacity();
        assert!((up - 20.0).abs() < 1e-6, "{up}");
        assert!((dn - 20.0).abs() < 1e-6, "{dn}");
        assert!((plan.nb_capacity_down[net.bus_index("A").unwrap()] - 20.0).abs() < 1e-6);
        let stage2 = solved.stages[1].solution.objective;
        let expected = (23_000.0 + 23_000.0) * 20.0 + (0.01 + 0.01) * 20.0;
        assert!((stage2 - expected).abs() <= 1e-9 * expected, "{stage2} vs {expected}");
    }

    #[test]
    fn scaling_booster_costs_scales_cost_not_placement() {
        let net = fixture("triangle");
        let base = triangle_cfg(ModelKind::Sequential);
        let doubled = ScenarioConfig {
            nb_capital_cost_up: 2.0 * base.nb_capital_cost_up,
            nb_capital_cost_down: 2.0 * base.nb_capital_cost_down,
            nb_dispatch_cost_up: 2.0 * base.nb_dispatch_cost_up,
            nb_dispatch_cost_down: 2.0 * base.nb_dispatch_cost_down,
            ..base.clone()
        };
        let p1 = solve_plan(&net, &base).unwrap();
        let p2 = solve_plan(&net, &doubled).unwrap();
        for i in 0..net.n_buses() {
            assert!((p1.plan.nb_capacity_up[i] - p2.plan.nb_capacity_up[i]).abs() < 1e-8);
            assert!((p1.plan.nb_capacity_down[i] - p2.plan.nb_capacity_down[i]).abs() < 1e-8);
        }
        let (a, b) = (p1.stages[1].solution.objective, p2.stages[1].solution.objective);
        assert!((2.0 * a - b).abs() <= 1e-9 * b, "{a} vs {b}");
    }

    #[test]
    fn prohibitive_booster_cost_reverts_to_preventive() {
        let net = fixture("triangle");
        let sim = solve_plan(
            &net,
            &ScenarioConfig {
                nb_capital_cost_up: 1e9,
                nb_capital_cost_down: 1e9,
                ..triangle_cfg(ModelKind::Simultaneous)
            },
        )
        .unwrap();
        let prev = solve_plan(
            &net,
            &ScenarioConfig { tatl_factor: 1.0, ..triangle_cfg(ModelKind::Preventive) },
        )
        .unwrap();
        let (up, dn) = sim.plan.total_nb_capacity();
        assert!(up + dn <= 1e-6, "{up} {dn}");
        let (a, b) = (sim.objective(), prev.objective());
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
        assert!((b - 17.52e6).abs() <= 1e-6 * 17.52e6, "{b}");
    }

    #[test]
    fn sequential_cost_report_is_consistent() {
        let net = fixture("triangle");
        let solved = solve_plan(&net, &triangle_cfg(ModelKind::Sequential)).unwrap();
        let r = &solved.plan.cost_report;
        let component_sum =
            r.capital_generation + r.operation_generation + r.nb_capital + r.nb_operation;
        assert!((r.total - component_sum).abs() <= 1e-6 * r.total.abs());
        let stage_sum = solved.objective();
        assert!((r.total - stage_sum).abs() <= 1e-6 * r.total.abs(), "{} vs {stage_sum}", r.total);
    }

    #[test]
    fn free_boosters_and_loose_ratings_reach_the_copper_plate_bound() {
        let net = fixture("triangle");
        let cfg = ScenarioConfig {
            nb_capital_cost_up: 0.0,
            nb_capital_cost_down: 0.0,
            nb_dispatch_cost_up: 0.0,
            nb_dispatch_cost_down: 0.0,
            tatl_factor: 10.0,
            ..triangle_cfg(ModelKind::Simultaneous)
        };
        let sim = solve_plan(&net, &cfg).unwrap();

        // Copper plate: one aggregate balance per snapshot, no network.
        let mut lp = LinearProgram::new("copper_plate");
        let mut co2 = Vec::new();
        let mut bal: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); net.n_snapshots()];
        for (s, g) in net.generators.iter().enumerate() {
            let (lb, ub) =
                if g.extendable { (0.0, g.max_capacity) } else { (g.max_capacity, g.max_capacity) };
            let cap = lp.add_variable(&format!("gcap/{}", g.id), lb, ub, g.capital_cost).unwrap();
            for t in 0..net.n_snapshots() {
                let w = net.weight(t);
                let d = lp
                    .add_variable(&format!("gdisp/{}/{t}", g.id), 0.0, f64::INFINITY, w * g.marginal_cost)
                    .unwrap();
                lp.add_constraint(
                    &format!("gen_avail/{}/{t}", g.id),
                    [(d, 1.0), (cap, -net.availability_of(s, t))],
                    Sense::Le,
                    0.0,
                )
                .unwrap();
                co2.push((d, w * g.emission_factor / g.efficiency));
                bal[t].push((d, 1.0));
            }
        }
        for (t, terms) in bal.into_iter().enumerate() {
            let demand: f64 = (0..net.n_buses()).map(|i| net.demand(i, t)).sum();
            lp.add_constraint(&format!("balance/{t}"), terms, Sense::Eq, demand).unwrap();
        }
        lp.add_constraint("co2", co2, Sense::Le, cfg.resolved_co2_cap().unwrap()).unwrap();
        let copper = solve(&lp, &cfg.solve_options());
        assert_eq!(copper.status, SolveStatus::Optimal);

        let gap = sim.objective() - copper.objective;
        assert!(gap >= -1e-6 * copper.objective.abs(), "relaxation must lower-bound: {gap}");
        // On this fixture the base ratings never bind below demand, so the
        // bound is tight.
        assert!(gap.abs() <= 1e-6 * copper.objective.abs(), "{gap}");
    }

    #[test]
    fn corrected_rows_carry_the_isolating_coefficients() {
        // Reference bus C so the per-bus sensitivities come out in the
        // coordinates the hand derivation used; balanced dispatch makes the
        // optimum itself reference-free.
        let net = fixture("triangle");
        let cfg = ScenarioConfig {
            slack_bus: Some("C".into()),
            ..triangle_cfg(ModelKind::Simultaneous)
        };
        let built = build_simultaneous_lp(&net, &cfg).unwrap();
        // Outage AC, survivor AB: only a booster at A moves the flow.
        let hi = terms_of(&built.lp, "corr/0/AC/AB/hi");
        let coef: std::collections::HashMap<&str, f64> = hi.into_iter().collect();
        assert!((coef["flow/AB/0"] - 1.0).abs() < 1e-12);
        assert!((coef["flow/AC/0"] - 1.0).abs() < 1e-12, "redistribution factor is 1");
        assert!((coef["nb_up/A/0/AC"] - 1.0).abs() < 1e-12);
        assert!((coef["nb_dn/A/0/AC"] + 1.0).abs() < 1e-12);
        assert!(!coef.contains_key("nb_up/B/0/AC"), "zero coefficients are dropped");
        assert!(!coef.contains_key("nb_up/C/0/AC"));
        // Outage BC, survivor AB: only a booster at B moves the flow, sign
        // flipped (injection at B relieves AB).
        let hi = terms_of(&built.lp, "corr/0/BC/AB/hi");
        let coef: std::collections::HashMap<&str, f64> = hi.into_iter().collect();
        assert!((coef["flow/AB/0"] - 1.0).abs() < 1e-12);
        assert!((coef["flow/BC/0"] + 1.0).abs() < 1e-12);
        assert!((coef["nb_up/B/0/BC"] + 1.0).abs() < 1e-12);
        assert!((coef["nb_dn/B/0/BC"] - 1.0).abs() < 1e-12);
        assert!(!coef.contains_key("nb_up/A/0/BC"));
    }

    #[test]
    fn stage_one_flows_violating_the_relaxed_limit_are_rejected() {
        let net = fixture("triangle");
        let cfg = triangle_cfg(ModelKind::Sequential);
        // A flow pattern whose AB loading after losing AC is 130 > 1.3 * 80.
        let flows = vec![vec![90.0, -10.0, 40.0]];
        let err = build_nb_placement_lp(&net, &flows, &cfg).unwrap_err();
        match err {
            PlanningError::StageOneViolation { snapshot, outage, line, excess } => {
                assert_eq!(snapshot, 0);
                assert_eq!(outage, "AC");
                assert_eq!(line, "AB");
                assert!((excess - 26.0).abs() < 1e-9, "{excess}");
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn fitting_fixed_flows_need_no_boosters() {
        let net = fixture("triangle_uncongested");
        let cfg = triangle_cfg(ModelKind::Sequential);
        let inj = net.injections(&[100.0, 0.0], 0);
        let flows = vec![crate::sensitivity::dc_flow(&net, &inj).unwrap()];
        let built = build_nb_placement_lp(&net, &flows, &cfg).unwrap();
        let sol = solve(&built.lp, &cfg.solve_options());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.objective.abs() <= 1e-9, "{}", sol.objective);
    }
}
