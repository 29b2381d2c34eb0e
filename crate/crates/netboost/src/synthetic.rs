//! Random synthetic networks for benchmarks and randomized checks.
//!
//! Generation is seeded-deterministic: a spanning tree guarantees
//! connectivity, extra lines (parallel ones allowed) add meshing. Reactances
//! are uniform in [0.1, 2] pu; ratings are generous so these nets exercise
//! sensitivity code rather than congestion.

use rand::Rng;

use crate::network::{Bus, Line, Network, Snapshot};

/// Connected random network with `n_buses` buses and `n_buses - 1 + extra_lines` lines.
pub fn random_connected(n_buses: usize, extra_lines: usize, rng: &mut impl Rng) -> Network {
    assert!(n_buses >= 2, "need at least two buses");
    let buses: Vec<Bus> = (0..n_buses)
        .map(|i| Bus { id: format!("b{i}"), name: None, x: None, y: None })
        .collect();

    let mut ends = Vec::new();
    for j in 1..n_buses {
        let parent = rng.gen_range(0..j);
        ends.push((parent, j));
    }
    for _ in 0..extra_lines {
        let f = rng.gen_range(0..n_buses);
        let mut t = rng.gen_range(0..n_buses);
        while t == f {
            t = rng.gen_range(0..n_buses);
        }
        ends.push((f, t));
    }
    let lines: Vec<Line> = ends
        .into_iter()
        .enumerate()
        .map(|(idx, (f, t))| Line {
            id: format!("l{idx}"),
            from_bus: format!("b{f}"),
            to_bus: format!("b{t}"),
            reactance: rng.gen_range(0.1..=2.0),
            patl: 1e4,
        })
        .collect();

    Network::new(
        buses,
        lines,
        vec![],
        vec![Snapshot { label: "h0".into(), weight: 8760.0 }],
        vec![vec![0.0; n_buses]],
        vec![vec![]],
        8760.0,
    )
    .expect("synthetic network construction is valid by design")
}

/// Random injections in [-100, 100] MW shifted to sum to exactly zero.
pub fn random_balanced_injections(n_buses: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n_buses).map(|_| rng.gen_range(-100.0..100.0)).collect();
    let mean = p.iter().sum::<f64>() / n_buses as f64;
    for v in &mut p {
        *v -= mean;
    }
    let residual: f64 = p.iter().sum();
    p[0] -= residual; // kill the last few ulps so the balance check is exact
    p
}
