//! DC power-flow sensitivities: PTDF, LODF, the deletion-resolve contingency
//! oracle, and bridge detection.
//!
//! Two independent routes exist for every post-outage quantity: the LODF
//! redistribution formula and a brute-force DC solve on the network with the
//! line removed. Tests hold them together to 1e-8; production code uses the
//! LODF route, the oracle guards it.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::network::{incidence_matrix, Network};

/// |1 - [PTDF K]_kk| below this flags line k as a bridge.
pub const BRIDGE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error("unknown slack bus '{0}'")]
    UnknownSlack(String),
    #[error("reduced susceptance Laplacian is singular; network must be connected")]
    SingularLaplacian,
    #[error("injections sum to {0} MW; must balance to zero within {1} MW")]
    UnbalancedInjections(f64, f64),
    #[error("line '{0}' is a bridge; single-outage flows are undefined for it")]
    BridgeContingency(String),
    #[error("numeric bridge flags {numeric:?} disagree with graph bridges {graph:?}")]
    BridgeMismatch { numeric: Vec<String>, graph: Vec<String> },
}

/// PTDF, LODF and bridge set for one network and slack choice.
///
/// `ptdf` is lines x buses (slack column all zero); `lodf` is lines x lines
/// with diagonal -1 and bridge columns NaN. Immutable and thread-safe.
#[derive(Debug, Clone)]
pub struct SensitivitySet {
    pub ptdf: DMatrix<f64>,
    pub lodf: DMatrix<f64>,
    pub bridges: BTreeSet<String>,
    pub slack_bus: String,
    bridge_idx: Vec<bool>,
}

impl SensitivitySet {
    /// Computes PTDF and LODF and cross-checks the numerically flagged bridge
    /// columns against graph-theoretic bridge finding; a mismatch means the
    /// network is conditioned badly enough that no result should be trusted.
    pub fn compute(net: &Network, slack: &str) -> Result<Self, SensitivityError> {
        let ptdf = compute_ptdf(net, slack)?;
        let k = incidence_matrix(net);
        let (lodf, numeric_bridges) = compute_lodf(&ptdf, &k, BRIDGE_TOL);
        let graph_bridges = find_bridges(net);
        let numeric: BTreeSet<String> =
            numeric_bridges.iter().map(|&l| net.lines[l].id.clone()).collect();
        if numeric != graph_bridges {
            return Err(SensitivityError::BridgeMismatch {
                numeric: numeric.into_iter().collect(),
                graph: graph_bridges.into_iter().collect(),
            });
        }
        let mut bridge_idx = vec![false; net.n_lines()];
        for &l in &numeric_bridges {
            bridge_idx[l] = true;
        }
        Ok(SensitivitySet { ptdf, lodf, bridges: graph_bridges, slack_bus: slack.to_string(), bridge_idx })
    }

    pub fn is_bridge(&self, line: usize) -> bool {
        self.bridge_idx[line]
    }
}

/// Power transfer distribution factors (lines x buses): flow change on each
/// line per 1 MW injected at a bus and withdrawn at the slack. Built from the
/// susceptance-weighted Laplacian with the slack row/column removed.
pub fn compute_ptdf(net: &Network, slack: &str) -> Result<DMatrix<f64>, SensitivityError> {
    let slack_idx = net.bus_index(slack).ok_or_else(|| SensitivityError::UnknownSlack(slack.into()))?;
    let n = net.n_buses();
    let m = net.n_lines();

    let zr = reduced_laplacian_inverse(net, slack_idx)?;
    // zfull: L^+ padded with zero slack row/column
    let keep: Vec<usize> = (0..n).filter(|&i| i != slack_idx).collect();
    let mut zfull = DMatrix::zeros(n, n);
    for (ri, &i) in keep.iter().enumerate() {
        for (rj, &j) in keep.iter().enumerate() {
            zfull[(i, j)] = zr[(ri, rj)];
        }
    }

    let mut ptdf = DMatrix::zeros(m, n);
    for l in 0..m {
        let b = 1.0 / net.lines[l].reactance;
        let (f, t) = net.line_ends(l);
        for i in 0..n {
            ptdf[(l, i)] = b * (zfull[(f, i)] - zfull[(t, i)]);
        }
    }
    Ok(ptdf)
}

fn reduced_laplacian_inverse(net: &Network, slack_idx: usize) -> Result<DMatrix<f64>, SensitivityError> {
    let n = net.n_buses();
    let mut lap = DMatrix::zeros(n, n);
    for l in 0..net.n_lines() {
        let b = 1.0 / net.lines[l].reactance;
        let (f, t) = net.line_ends(l);
        lap[(f, f)] += b;
        lap[(t, t)] += b;
        lap[(f, t)] -= b;
        lap[(t, f)] -= b;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != slack_idx).collect();
    let mut red = DMatrix::zeros(n - 1, n - 1);
    for (ri, &i) in keep.iter().enumerate() {
        for (rj, &j) in keep.iter().enumerate() {
            red[(ri, rj)] = lap[(i, j)];
        }
    }
    red.try_inverse().ok_or(SensitivityError::SingularLaplacian)
}

/// Line outage distribution factors from PTDF and the incidence matrix.
///
/// Off-diagonal: `[PTDF K]_lk / (1 - [PTDF K]_kk)`. Diagonal defined as -1.
/// Columns whose denominator magnitude falls below `bridge_tol` belong to
/// bridges: they are returned in the second value and filled with NaN instead
/// of being computed.
pub fn compute_lodf(ptdf: &DMatrix<f64>, incidence: &DMatrix<f64>, bridge_tol: f64) -> (DMatrix<f64>, Vec<usize>) {
    let m = ptdf.nrows();
    let pk = ptdf * incidence; // lines x lines
    let mut lodf = DMatrix::zeros(m, m);
    let mut bridges = Vec::new();
    for k in 0..m {
        let denom = 1.0 - pk[(k, k)];
        if denom.abs() < bridge_tol {
            bridges.push(k);
            for l in 0..m {
                lodf[(l, k)] = f64::NAN;
            }
            continue;
        }
        for l in 0..m {
            lodf[(l, k)] = pk[(l, k)] / denom;
        }
        lodf[(k, k)] = -1.0;
    }
    (lodf, bridges)
}

/// Brute-force DC power flow: solves the angle system for given nodal
/// injections (MW, summing to zero) and returns per-line flows (MW, positive
/// in the line's from->to direction). This is the oracle every sensitivity
/// shortcut is checked against.
pub fn dc_flow(net: &Network, injections: &[f64]) -> Result<Vec<f64>, SensitivityError> {
    assert_eq!(injections.len(), net.n_buses(), "one injection per bus");
    let total: f64 = injections.iter().sum();
    let scale = injections.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if total.abs() > 1e-6 * scale.max(1.0) {
        return Err(SensitivityError::UnbalancedInjections(total, 1e-6));
    }
    let slack_idx = 0;
    let zr = reduced_laplacian_inverse(net, slack_idx)?;
    let keep: Vec<usize> = (0..net.n_buses()).filter(|&i| i != slack_idx).collect();
    let p_red = DMatrix::from_iterator(keep.len(), 1, keep.iter().map(|&i| injections[i]));
    let theta_red = &zr * p_red;
    let mut theta = vec![0.0; net.n_buses()];
    for (ri, &i) in keep.iter().enumerate() {
        theta[i] = theta_red[(ri, 0)];
    }
    Ok((0..net.n_lines())
        .map(|l| {
            let (f, t) = net.line_ends(l);
            (theta[f] - theta[t]) / net.lines[l].reactance
        })
        .collect())
}

/// Post-outage flows after losing line `k`, by LODF redistribution:
/// `f_l + LODF[l,k] * f_k` for every surviving line; entry `k` is set to 0.
pub fn post_outage_flow(base_flows: &[f64], sens: &SensitivitySet, k: usize, net: &Network) -> Result<Vec<f64>, SensitivityError> {
    if sens.is_bridge(k) {
        return Err(SensitivityError::BridgeContingency(net.lines[k].id.clone()));
    }
    let fk = base_flows[k];
    let mut out: Vec<f64> = (0..base_flows.len())
        .map(|l| base_flows[l] + sens.lodf[(l, k)] * fk)
        .collect();
    out[k] = 0.0;
    Ok(out)
}

/// Deletion-resolve oracle: DC flows on the network with line `k` removed.
/// Returns flows indexed like the original line list, 0.0 at `k`.
/// Fails on bridges (the reduced network would be disconnected).
pub fn dc_flow_without_line(net: &Network, injections: &[f64], k: usize) -> Result<Vec<f64>, SensitivityError> {
    let reduced = remove_line(net, k);
    let flows = dc_flow(&reduced, injections)?;
    let mut out = Vec::with_capacity(net.n_lines());
    let mut it = flows.into_iter();
    for l in 0..net.n_lines() {
        out.push(if l == k { 0.0 } else { it.next().unwrap() });
    }
    Ok(out)
}

fn remove_line(net: &Network, k: usize) -> Network {
    let lines: Vec<_> = net.lines.iter().enumerate().filter(|&(l, _)| l != k).map(|(_, line)| line.clone()).collect();
    // Bypasses Network::new: deleting a bridge leaves a disconnected graph,
    // which dc_flow then reports as a singular Laplacian.
    let mut reduced = net.clone();
    reduced.lines = lines;
    reduced
}

/// Graph-theoretic bridges: lines whose removal disconnects the network.
/// Iterative lowpoint search; parallel lines are handled by skipping only the
/// tree edge itself, so a doubled line is never a bridge.
pub fn find_bridges(net: &Network) -> BTreeSet<String> {
    let n = net.n_buses();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, line idx)
    for l in 0..net.n_lines() {
        let (f, t) = net.line_ends(l);
        adj[f].push((t, l));
        adj[t].push((f, l));
    }

    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    let mut bridges = BTreeSet::new();

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        // stack frames: (vertex, entering line idx or UNSEEN, next adj position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, UNSEEN, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, pe, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (u, e) = adj[v][*pos];
                *pos += 1;
                if e == pe {
                    continue;
                }
                if disc[u] == UNSEEN {
                    disc[u] = timer;
                    low[u] = timer;
                    timer += 1;
                    stack.push((u, e, 0));
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        bridges.insert(net.lines[pe].id.clone());
                    }
                }
            }
        }
    }
    bridges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_network, Bus, Line, Snapshot};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::path::Path;

    fn triangle() -> Network {
        load_network(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/triangle")).unwrap()
    }

    // Hand-derived for the equal-reactance triangle with slack C:
    // reduced Laplacian [[2,-1],[-1,2]], inverse (1/3)[[2,1],[1,2]].
    #[test]
    fn triangle_ptdf_matches_hand_solution() {
        let net = triangle();
        let ptdf = compute_ptdf(&net, "C").unwrap();
        let (a, b, c) = (0, 1, 2);
        let (ab, bc, ac) = (0, 1, 2);
        let third = 1.0 / 3.0;
        assert_abs_diff_eq!(ptdf[(ab, a)], third, epsilon = 1e-12);
        assert_abs_diff_eq!(ptdf[(ac, a)], 2.0 * third, epsilon = 1e-12);
        assert_abs_diff_eq!(ptdf[(bc, a)], third, epsilon = 1e-12);
        assert_abs_diff_eq!(ptdf[(ab, b)], -third, epsilon = 1e-12);
        assert_abs_diff_eq!(ptdf[(ac, b)], third, epsilon = 1e-12);
        assert_abs_diff_eq!(ptdf[(bc, b)], 2.0 * third, epsilon = 1e-12);
        for l in 0..3 {
            assert_eq!(ptdf[(l, c)], 0.0, "slack column must be exactly zero");
        }
    }

    #[test]
    fn triangle_dc_flow_matches_series_parallel_reduction() {
        let net = triangle();
        // +1 MW at A, -1 MW at B: direct path carries 2/3, two-hop path 1/3.
        let flows = dc_flow(&net, &[1.0, -1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(flows[0], 2.0 / 3.0, epsilon = 1e-12); // AB
        assert_abs_diff_eq!(flows[2], 1.0 / 3.0, epsilon = 1e-12); // AC
        // line BC is oriented B->C; the 1/3 MW flows C->B, hence negative.
        assert_abs_diff_eq!(flows[1], -1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn dc_flow_zero_injections_and_linearity() {
        let net = triangle();
        let zero = dc_flow(&net, &[0.0; 3]).unwrap();
        assert!(zero.iter().all(|&f| f == 0.0));
        let f1 = dc_flow(&net, &[1.0, -1.0, 0.0]).unwrap();
        let f5 = dc_flow(&net, &[5.0, -5.0, 0.0]).unwrap();
        for l in 0..3 {
            assert_abs_diff_eq!(f5[l], 5.0 * f1[l], epsilon = 1e-12);
        }
    }

    #[test]
    fn dc_flow_rejects_unbalanced_injections() {
        let net = triangle();
        assert!(matches!(
            dc_flow(&net, &[1.0, 0.0, 0.0]),
            Err(SensitivityError::UnbalancedInjections(..))
        ));
    }

    #[test]
    fn triangle_lodf_matches_deletion_resolve() {
        let net = triangle();
        let sens = SensitivitySet::compute(&net, "C").unwrap();
        let (ab, bc, ac) = (0, 1, 2);
        // Severing AB reroutes its flow over A->C->B: +1 on AC, -1 on BC
        // (BC is oriented B->C, the rerouted power runs C->B).
        assert_abs_diff_eq!(sens.lodf[(ac, ab)], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sens.lodf[(bc, ab)], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sens.lodf[(ab, ac)], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sens.lodf[(bc, ac)], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sens.lodf[(ab, bc)], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sens.lodf[(ac, bc)], 1.0, epsilon = 1e-9);
        for l in 0..3 {
            assert_eq!(sens.lodf[(l, l)], -1.0, "diagonal is -1 by definition");
        }
    }

    #[test]
    fn post_outage_flow_equals_deletion_oracle_on_triangle() {
        let net = triangle();
        let sens = SensitivitySet::compute(&net, "A").unwrap();
        let inj = [70.0, -100.0, 30.0];
        let base = dc_flow(&net, &inj).unwrap();
        for k in 0..3 {
            let fast = post_outage_flow(&base, &sens, k, &net).unwrap();
            let slow = dc_flow_without_line(&net, &inj, k).unwrap();
            for l in 0..3 {
                assert_abs_diff_eq!(fast[l], slow[l], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn zero_flow_on_outaged_line_means_no_redistribution() {
        let net = triangle();
        let sens = SensitivitySet::compute(&net, "A").unwrap();
        let mut base = vec![1.5, -2.5, 4.0];
        base[0] = 0.0;
        let post = post_outage_flow(&base, &sens, 0, &net).unwrap();
        assert_eq!(&post[1..], &base[1..]);
    }

    fn two_bus_net() -> Network {
        let buses = vec![
            Bus { id: "A".into(), name: None, x: None, y: None },
            Bus { id: "B".into(), name: None, x: None, y: None },
        ];
        let lines = vec![Line { id: "AB".into(), from_bus: "A".into(), to_bus: "B".into(), reactance: 0.5, patl: 10.0 }];
        Network::new(buses, lines, vec![], vec![Snapshot { label: "h0".into(), weight: 8760.0 }], vec![vec![0.0, 0.0]], vec![vec![]], 8760.0).unwrap()
    }

    #[test]
    fn single_line_is_flagged_bridge_not_computed() {
        let net = two_bus_net();
        let sens = SensitivitySet::compute(&net, "A").unwrap();
        assert!(sens.bridges.contains("AB"));
        assert!(sens.lodf[(0, 0)].is_nan());
        assert!(matches!(
            post_outage_flow(&[1.0], &sens, 0, &net),
            Err(SensitivityError::BridgeContingency(_))
        ));
    }

    #[test]
    fn path_and_pendant_bridges() {
        let mk_bus = |id: &str| Bus { id: id.into(), name: None, x: None, y: None };
        let mk_line = |id: &str, f: &str, t: &str| Line {
            id: id.into(),
            from_bus: f.into(),
            to_bus: t.into(),
            reactance: 1.0,
            patl: 10.0,
        };
        let snap = vec![Snapshot { label: "h0".into(), weight: 8760.0 }];

        let path = Network::new(
            vec![mk_bus("A"), mk_bus("B"), mk_bus("C")],
            vec![mk_line("AB", "A", "B"), mk_line("BC", "B", "C")],
            vec![],
            snap.clone(),
            vec![vec![0.0; 3]],
            vec![vec![]],
            8760.0,
        )
        .unwrap();
        assert_eq!(find_bridges(&path).len(), 2, "every tree edge is a bridge");

        let tri = triangle();
        assert!(find_bridges(&tri).is_empty(), "a cycle has no bridge");

        let pendant = Network::new(
            vec![mk_bus("A"), mk_bus("B"), mk_bus("C"), mk_bus("D")],
            vec![
                mk_line("AB", "A", "B"),
                mk_line("BC", "B", "C"),
                mk_line("AC", "A", "C"),
                mk_line("CD", "C", "D"),
            ],
            vec![],
            snap.clone(),
            vec![vec![0.0; 4]],
            vec![vec![]],
            8760.0,
        )
        .unwrap();
        let b = find_bridges(&pendant);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec!["CD"]);

        // doubled pendant line: no longer a bridge
        let doubled = Network::new(
            vec![mk_bus("A"), mk_bus("B"), mk_bus("C"), mk_bus("D")],
            vec![
                mk_line("AB", "A", "B"),
                mk_line("BC", "B", "C"),
                mk_line("AC", "A", "C"),
                mk_line("CD", "C", "D"),
                mk_line("CD2", "C", "D"),
            ],
            vec![],
            snap,
            vec![vec![0.0; 4]],
            vec![vec![]],
            8760.0,
        )
        .unwrap();
        assert!(find_bridges(&doubled).is_empty());
    }

    #[test]
    fn slack_invariance_on_balanced_injections() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let net = crate::synthetic::random_connected(8, 5, &mut rng);
            let inj = crate::synthetic::random_balanced_injections(net.n_buses(), &mut rng);
            let p1 = compute_ptdf(&net, &net.buses[0].id).unwrap();
            let p2 = compute_ptdf(&net, &net.buses[net.n_buses() - 1].id).unwrap();
            let inj_m = DMatrix::from_iterator(net.n_buses(), 1, inj.iter().copied());
            let f1 = &p1 * &inj_m;
            let f2 = &p2 * &inj_m;
            let max_dev = (&f1 - &f2).abs().max();
            assert!(max_dev <= 1e-10, "slack dependence {max_dev} on balanced injections");
        }
    }

    #[test]
    fn random_networks_lodf_equals_deletion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..30 {
            let net = crate::synthetic::random_connected(5 + (trial % 12), trial % 6, &mut rng);
            let sens = SensitivitySet::compute(&net, &net.buses[0].id).unwrap();
            let inj = crate::synthetic::random_balanced_injections(net.n_buses(), &mut rng);
            let base = dc_flow(&net, &inj).unwrap();
            for k in 0..net.n_lines() {
                if sens.is_bridge(k) {
                    continue;
                }
                let fast = post_outage_flow(&base, &sens, k, &net).unwrap();
                let slow = dc_flow_without_line(&net, &inj, k).unwrap();
                for l in 0..net.n_lines() {
                    assert!(
                        (fast[l] - slow[l]).abs() <= 1e-8,
                        "trial {trial} line {l} outage {k}: {} vs {}",
                        fast[l],
                        slow[l]
                    );
                }
            }
        }
    }

    #[test]
    fn dc_flow_nodal_balance_residual_below_1e9() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = crate::synthetic::random_connected(12, 8, &mut rng);
        let inj = crate::synthetic::random_balanced_injections(net.n_buses(), &mut rng);
        let flows = dc_flow(&net, &inj).unwrap();
        let k = incidence_matrix(&net);
        for i in 0..net.n_buses() {
            let mut residual = inj[i];
            for l in 0..net.n_lines() {
                residual -= k[(i, l)] * flows[l];
            }
            assert!(residual.abs() < 1e-9, "bus {i} residual {residual}");
        }
    }
}
