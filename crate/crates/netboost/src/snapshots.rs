//! Typical-hour selection: clusters full-length demand/availability series
//! into k weighted representative hours with k-means, then snaps each
//! centroid back to the nearest real hour so the reduced series stay jointly
//! realizable (a synthetic centroid can mix, say, high wind with high solar
//! in a way no real hour does).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use std::path::Path;

use crate::network::{load_network_with_period, write_network, Network, NetworkError, Snapshot};

/// Centroid movement below this ends the Lloyd iteration.
const CONVERGENCE_TOL: f64 = 1e-6;
const MAX_ITERATIONS: usize = 300;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("k must be at least 1")]
    KZero,
    #[error("k = {k} exceeds the {n} source hours")]
    KTooLarge { k: usize, n: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Hour-by-feature matrix, min-max normalized per column so demand in MW and
/// availability in [0, 1] weigh comparably. Constant columns normalize to 0.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    /// Normalized rows, every entry in [0, 1].
    pub rows: Vec<Vec<f64>>,
    /// One name per column: `load/{bus}` then `avail/{generator}`.
    pub columns: Vec<String>,
    /// Per-column normalization parameters (raw min, raw max).
    pub ranges: Vec<(f64, f64)>,
    /// Period length in hours the source rows jointly represent.
    pub period_hours: f64,
}

impl FeatureMatrix {
    /// One row per snapshot: per-bus demand followed by per-generator
    /// availability.
    pub fn from_network(net: &Network) -> FeatureMatrix {
        let mut columns = Vec::with_capacity(net.n_buses() + net.n_generators());
        for b in &net.buses {
            columns.push(format!("load/{}", b.id));
        }
        for g in &net.generators {
            columns.push(format!("avail/{}", g.id));
        }
        let raw: Vec<Vec<f64>> = (0..net.n_snapshots())
            .map(|t| {
                let mut row = Vec::with_capacity(columns.len());
                for i in 0..net.n_buses() {
                    row.push(net.demand(i, t));
                }
                for s in 0..net.n_generators() {
                    row.push(net.availability_of(s, t));
                }
                row
            })
            .collect();
        let ranges: Vec<(f64, f64)> = (0..columns.len())
            .map(|c| {
                let lo = raw.iter().map(|r| r[c]).fold(f64::INFINITY, f64::min);
                let hi = raw.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            })
            .collect();
        let rows = raw
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .zip(&ranges)
                    .map(|(v, &(lo, hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
                    .collect()
            })
            .collect();
        FeatureMatrix { rows, columns, ranges, period_hours: net.period_hours }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

/// A clustering of source hours into weighted representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// Source row index of each representative hour (the cluster medoid).
    pub representatives: Vec<usize>,
    /// Hours each representative stands for; sums to the period exactly.
    pub weights: Vec<f64>,
    /// Cluster position for every source row.
    pub assignment: Vec<usize>,
    /// Converged centroids in normalized feature space.
    pub centroids: Vec<Vec<f64>>,
    /// Source rows per cluster.
    pub sizes: Vec<usize>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Standard k-means over the normalized rows: k-means++ seeding from the
/// given seed, Lloyd iteration capped at 300 rounds with a 1e-6 movement
/// tolerance, empty clusters re-seeded to the farthest point. Each source
/// hour counts as an equal slice of the period, so a cluster weighs
/// `size / n * period`. If the data holds fewer distinct rows than k, the
/// unfillable clusters collapse away and fewer representatives come back.
pub fn reduce_snapshots(
    features: &FeatureMatrix,
    k: usize,
    seed: u64,
) -> Result<Reduction, SnapshotError> {
    let n = features.n_rows();
    if k == 0 {
        return Err(SnapshotError::KZero);
    }
    if k > n {
        return Err(SnapshotError::KTooLarge { k, n });
    }
    let rows = &features.rows;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++: first centroid uniform, the rest sampled proportionally to
    // the squared distance from the nearest existing centroid. When every
    // remaining row coincides with a centroid, fall back to an unused index
    // so k distinct source rows are always chosen.
    let mut chosen: Vec<usize> = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = rows.iter().map(|r| dist2(r, &rows[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n leaves an unused row")
        };
        chosen.push(next);
        for (i, row) in rows.iter().enumerate() {
            d2[i] = d2[i].min(dist2(row, &rows[next]));
        }
    }
    let mut centroids: Vec<Vec<f64>> = chosen.iter().map(|&i| rows[i].clone()).collect();

    let mut assignment = vec![0usize; n];
    for _ in 0..MAX_ITERATIONS {
        assign_nearest(rows, &centroids, &mut assignment);
        let mut sizes = cluster_sizes(&assignment, k);

        // Re-seed empty clusters to the point farthest from its centroid,
        // drawn from clusters that can spare one.
        for j in 0..k {
            if sizes[j] > 0 {
                continue;
            }
            let donor = (0..n)
                .filter(|&i| sizes[assignment[i]] > 1)
                .max_by(|&a, &b| {
                    dist2(&rows[a], &centroids[assignment[a]])
                        .total_cmp(&dist2(&rows[b], &centroids[assignment[b]]))
                        .then(b.cmp(&a))
                });
            let Some(i) = donor else { break };
            if dist2(&rows[i], &centroids[assignment[i]]) == 0.0 {
                break; // fewer distinct rows than k; leave the cluster empty
            }
            sizes[assignment[i]] -= 1;
            assignment[i] = j;
            sizes[j] = 1;
        }

        let next = mean_centroids(rows, &assignment, &centroids, k);
        let movement = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| dist2(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if movement <= CONVERGENCE_TOL {
            break;
        }
    }
    // Final pass so the reported assignment is optimal for the reported
    // centroids.
    assign_nearest(rows, &centroids, &mut assignment);
    let sizes = cluster_sizes(&assignment, k);

    // Medoid snap-back: the cluster member nearest the centroid represents
    // the cluster. Empty clusters (possible only with duplicate-heavy data)
    // are dropped.
    let kept: Vec<usize> = (0..k).filter(|&j| sizes[j] > 0).collect();
    if kept.len() < k {
        log::warn!("{} of {k} clusters stayed empty and were dropped", k - kept.len());
    }
    let mut remap = vec![usize::MAX; k];
    let mut representatives = Vec::with_capacity(kept.len());
    for (pos, &j) in kept.iter().enumerate() {
        remap[j] = pos;
        let medoid = (0..n)
            .filter(|&i| assignment[i] == j)
            .min_by(|&a, &b| {
                dist2(&rows[a], &centroids[j]).total_cmp(&dist2(&rows[b], &centroids[j])).then(a.cmp(&b))
            })
            .expect("kept clusters are non-empty");
        representatives.push(medoid);
    }
    let assignment: Vec<usize> = assignment.into_iter().map(|j| remap[j]).collect();
    let centroids: Vec<Vec<f64>> = kept.iter().map(|&j| centroids[j].clone()).collect();
    let sizes: Vec<usize> = kept.iter().map(|&j| sizes[j]).collect();

    let per_hour = features.period_hours / n as f64;
    let mut weights: Vec<f64> = sizes.iter().map(|&s| s as f64 * per_hour).collect();
    let drift = features.period_hours - weights.iter().sum::<f64>();
    if drift != 0.0 {
        let largest = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("at least one cluster");
        weights[largest] += drift;
    }

    Ok(Reduction { representatives, weights, assignment, centroids, sizes })
}

fn assign_nearest(rows: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &mut [usize]) {
    for (i, row) in rows.iter().enumerate() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (j, c) in centroids.iter().enumerate() {
            let d = dist2(row, c);
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        assignment[i] = best;
    }
}

fn cluster_sizes(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0usize; k];
    for &j in assignment {
        sizes[j] += 1;
    }
    sizes
}

/// Means per cluster; empty clusters keep their previous centroid.
fn mean_centroids(
    rows: &[Vec<f64>],
    assignment: &[usize],
    previous: &[Vec<f64>],
    k: usize,
) -> Vec<Vec<f64>> {
    let dim = previous[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (row, &j) in rows.iter().zip(assignment) {
        counts[j] += 1;
        for (s, v) in sums[j].iter_mut().zip(row) {
            *s += v;
        }
    }
    (0..k)
        .map(|j| {
            if counts[j] == 0 {
                previous[j].clone()
            } else {
                sums[j].iter().map(|s| s / counts[j] as f64).collect()
            }
        })
        .collect()
}

/// Reads a full-length network directory, clusters its hours, and writes the
/// same network with the k representative snapshots (and correspondingly
/// reduced `loads.csv` / `availability.csv`) into `dst`. The period length
/// is taken from the source snapshot weights, so operating costs stay
/// comparable before and after reduction.
pub fn reduce_series_dir(
    src: impl AsRef<Path>,
    dst: impl AsRef<Path>,
    k: usize,
    seed: u64,
) -> Result<(Network, Reduction), SnapshotError> {
    let src = src.as_ref();
    let period = read_period(src)?;
    let net = load_network_with_period(src, period)?;
    let features = FeatureMatrix::from_network(&net);
    let reduction = reduce_snapshots(&features, k, seed)?;

    let snapshots: Vec<Snapshot> = reduction
        .representatives
        .iter()
        .zip(&reduction.weights)
        .map(|(&t, &w)| Snapshot { label: net.snapshots[t].label.clone(), weight: w })
        .collect();
    let loads: Vec<Vec<f64>> =
        reduction.representatives.iter().map(|&t| net.loads[t].clone()).collect();
    let availability: Vec<Vec<f64>> =
        reduction.representatives.iter().map(|&t| net.availability[t].clone()).collect();
    let reduced = Network::new(
        net.buses.clone(),
        net.lines.clone(),
        net.generators.clone(),
        snapshots,
        loads,
        availability,
        period,
    )?;
    write_network(&reduced, dst)?;
    Ok((reduced, reduction))
}

/// Sum of the weight column of `snapshots.csv`, the period the series spans.
pub(crate) fn read_period(dir: &Path) -> Result<f64, SnapshotError> {
    let path = dir.join("snapshots.csv");
    if !path.is_file() {
        return Err(NetworkError::MissingFile(path).into());
    }
    let csv_err = |source| NetworkError::Csv { path: path.clone(), source };
    let mut rdr = csv::Reader::from_path(&path).map_err(csv_err)?;
    let weight_col = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .position(|h| h == "weight_hours")
        .ok_or_else(|| NetworkError::File {
            file: path.display().to_string(),
            msg: "missing 'weight_hours' column".into(),
        })?;
    let mut period = 0.0;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        period += rec
            .get(weight_col)
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| NetworkError::File {
                file: path.display().to_string(),
                msg: "bad weight value".into(),
            })?;
    }
    Ok(period)
}
