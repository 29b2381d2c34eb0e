//! Power-system data model: buses, lines, generators, loads, snapshots.
//!
//! A [`Network`] loads from a directory of CSV files ([`load_network`]) and is
//! immutable once constructed: every reference is cross-checked, the graph is
//! connected, and the demand/availability series are aligned with the
//! snapshot index. Construction failure carries file and row context.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use thiserror::Error;

/// Default modeled period: one year of hourly weights.
pub const DEFAULT_PERIOD_HOURS: f64 = 8760.0;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("missing input file {0}")]
    MissingFile(PathBuf),
    #[error("{file} row {row}: {msg}")]
    Row { file: String, row: usize, msg: String },
    #[error("{file}: {msg}")]
    File { file: String, msg: String },
    #[error("{file} row {row}: unknown bus '{bus}'")]
    UnknownBus { file: String, row: usize, bus: String },
    #[error("network graph is disconnected: bus '{unreached}' is unreachable from '{root}'")]
    Disconnected { root: String, unreached: String },
    #[error("snapshot weights sum to {got} h but the modeled period is {expected} h; weights must sum to period length")]
    WeightSum { got: f64, expected: f64 },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: String,
    /// Optional human-readable label; reporting only.
    pub name: Option<String>,
    /// Optional coordinates; reporting only.
    pub x: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Series reactance, per unit on the common MVA base. Strictly positive.
    pub reactance: f64,
    /// Permanently admissible loading (continuous rating), MW. Strictly positive.
    pub patl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    /// Annualized capacity cost, EUR/MW/a.
    pub capital_cost: f64,
    /// Dispatch cost, EUR/MWh (electric).
    pub marginal_cost: f64,
    /// Capacity potential (extendable) or installed capacity (fixed), MW.
    pub max_capacity: f64,
    /// tCO2 per MWh of fuel burned.
    pub emission_factor: f64,
    /// Fuel-to-electricity efficiency in (0, 1].
    pub efficiency: f64,
    /// false: capacity fixed at `max_capacity`; true: optimizer sizes it in [0, max_capacity].
    pub extendable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub label: String,
    /// Hours per period represented by this snapshot.
    pub weight: f64,
}

/// Validated, immutable network. Safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub snapshots: Vec<Snapshot>,
    /// Demand in MW, indexed `[snapshot][bus]`.
    pub loads: Vec<Vec<f64>>,
    /// Availability factor in [0, 1], indexed `[snapshot][generator]`.
    pub availability: Vec<Vec<f64>>,
    /// Modeled period length the snapshot weights sum to, in hours.
    pub period_hours: f64,
    bus_index: HashMap<String, usize>,
    line_index: HashMap<String, usize>,
    gen_index: HashMap<String, usize>,
    gens_at_bus: Vec<Vec<usize>>,
}

impl Network {
    /// Builds and validates a network from parts. `loads` and `availability`
    /// must already be aligned with `snapshots` (one row per snapshot).
    pub fn new(
        buses: Vec<Bus>,
        lines: Vec<Line>,
        generators: Vec<Generator>,
        snapshots: Vec<Snapshot>,
        loads: Vec<Vec<f64>>,
        availability: Vec<Vec<f64>>,
        period_hours: f64,
    ) -> Result<Self, NetworkError> {
        let err = |msg: String| NetworkError::File { file: "network".into(), msg };

        let mut bus_index = HashMap::new();
        for b in &buses {
            check_id("bus", &b.id).map_err(err)?;
            if bus_index.insert(b.id.clone(), bus_index.len()).is_some() {
                return Err(err(format!("duplicate bus id '{}'", b.id)));
            }
        }
        let mut line_index = HashMap::new();
        for l in &lines {
            check_id("line", &l.id).map_err(err)?;
            if line_index.insert(l.id.clone(), line_index.len()).is_some() {
                return Err(err(format!("duplicate line id '{}'", l.id)));
            }
            if l.from_bus == l.to_bus {
                return Err(err(format!("line '{}' connects bus '{}' to itself", l.id, l.from_bus)));
            }
            for b in [&l.from_bus, &l.to_bus] {
                if !bus_index.contains_key(b) {
                    return Err(NetworkError::UnknownBus { file: "lines".into(), row: 0, bus: b.clone() });
                }
            }
            if !(l.reactance > 0.0) {
                return Err(err(format!("line '{}' reactance must be > 0, got {}", l.id, l.reactance)));
            }
            if !(l.patl > 0.0) {
                return Err(err(format!("line '{}' patl must be > 0, got {}", l.id, l.patl)));
            }
        }
        let mut gen_index = HashMap::new();
        for g in &generators {
            check_id("generator", &g.id).map_err(err)?;
            if gen_index.insert(g.id.clone(), gen_index.len()).is_some() {
                return Err(err(format!("duplicate generator id '{}'", g.id)));
            }
            if !bus_index.contains_key(&g.bus) {
                return Err(NetworkError::UnknownBus { file: "generators".into(), row: 0, bus: g.bus.clone() });
            }
            if !(g.efficiency > 0.0 && g.efficiency <= 1.0) {
                return Err(err(format!("generator '{}' efficiency must be in (0, 1], got {}", g.id, g.efficiency)));
            }
            if !(g.max_capacity >= 0.0) {
                return Err(err(format!("generator '{}' max_capacity must be >= 0, got {}", g.id, g.max_capacity)));
            }
            if !(g.capital_cost >= 0.0) || !(g.marginal_cost >= 0.0) || !(g.emission_factor >= 0.0) {
                return Err(err(format!("generator '{}' costs and emission factor must be >= 0", g.id)));
            }
        }

        if snapshots.is_empty() {
            return Err(err("at least one snapshot is required".into()));
        }
        let mut labels = HashSet::new();
        for s in &snapshots {
            if !labels.insert(s.label.clone()) {
                return Err(err(format!("duplicate snapshot label '{}'", s.label)));
            }
            if !(s.weight > 0.0) {
                return Err(err(format!("snapshot '{}' weight must be > 0, got {}", s.label, s.weight)));
            }
        }
        let wsum: f64 = snapshots.iter().map(|s| s.weight).sum();
        if (wsum - period_hours).abs() > 1e-6 * period_hours.max(1.0) {
            return Err(NetworkError::WeightSum { got: wsum, expected: period_hours });
        }

        let nt = snapshots.len();
        if loads.len() != nt || availability.len() != nt {
            return Err(err(format!(
                "series length mismatch: {} snapshots, {} load rows, {} availability rows",
                nt,
                loads.len(),
                availability.len()
            )));
        }
        for (t, row) in loads.iter().enumerate() {
            if row.len() != buses.len() {
                return Err(err(format!("load row {t} has {} entries for {} buses", row.len(), buses.len())));
            }
            for (i, &d) in row.iter().enumerate() {
                if !(d >= 0.0) {
                    return Err(err(format!("demand at bus '{}' snapshot '{}' must be >= 0, got {d}", buses[i].id, snapshots[t].label)));
                }
            }
        }
        for (t, row) in availability.iter().enumerate() {
            if row.len() != generators.len() {
                return Err(err(format!("availability row {t} has {} entries for {} generators", row.len(), generators.len())));
            }
            for (s, &a) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&a) {
                    return Err(err(format!(
                        "availability of '{}' in snapshot '{}' must be in [0, 1], got {a}",
                        generators[s].id, snapshots[t].label
                    )));
                }
            }
        }

        // Connectivity by BFS over the line graph.
        if !buses.is_empty() {
            let n = buses.len();
            let mut adj = vec![Vec::new(); n];
            for l in &lines {
                let (f, t) = (bus_index[&l.from_bus], bus_index[&l.to_bus]);
                adj[f].push(t);
                adj[t].push(f);
            }
            let mut seen = vec![false; n];
            let mut queue = std::collections::VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                return Err(NetworkError::Disconnected { root: buses[0].id.clone(), unreached: buses[i].id.clone() });
            }
        }

        let mut gens_at_bus = vec![Vec::new(); buses.len()];
        for (s, g) in generators.iter().enumerate() {
            gens_at_bus[bus_index[&g.bus]].push(s);
        }

        Ok(Network {
            buses,
            lines,
            generators,
            snapshots,
            loads,
            availability,
            period_hours,
            bus_index,
            line_index,
            gen_index,
            gens_at_bus,
        })
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }
    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }
    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }
    pub fn n_snapshots(&self) -> usize {
        self.snapshots.len()
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.bus_index.get(id).copied()
    }
    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.line_index.get(id).copied()
    }
    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.gen_index.get(id).copied()
    }

    /// Generator indices attached to bus `i`.
    pub fn generators_at(&self, i: usize) -> &[usize] {
        &self.gens_at_bus[i]
    }

    pub fn demand(&self, bus: usize, t: usize) -> f64 {
        self.loads[t][bus]
    }
    pub fn availability_of(&self, gen: usize, t: usize) -> f64 {
        self.availability[t][gen]
    }
    pub fn weight(&self, t: usize) -> f64 {
        self.snapshots[t].weight
    }

    /// Endpoint bus indices (from, to) of line `l`.
    pub fn line_ends(&self, l: usize) -> (usize, usize) {
        let line = &self.lines[l];
        (self.bus_index[&line.from_bus], self.bus_index[&line.to_bus])
    }

    /// Net injection (generation minus demand) per bus implied by a dispatch
    /// row `gen_mw[generator]` at snapshot `t`. MW.
    pub fn injections(&self, gen_mw: &[f64], t: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.n_buses()];
        for (s, &g) in gen_mw.iter().enumerate() {
            p[self.bus_index[&self.generators[s].bus]] += g;
        }
        for (i, inj) in p.iter_mut().enumerate() {
            *inj -= self.loads[t][i];
        }
        p
    }
}

/// Ids are restricted so they can double as parts of solver variable names:
/// leading letter, then letters, digits, '_' or '.'. Must not read as a number.
fn check_id(kind: &str, id: &str) -> Result<(), String> {
    let ok = id
        .chars()
        .next()
        .map(|c| c.is_ascii_alphabetic())
        .unwrap_or(false)
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        && id.parse::<f64>().is_err();
    if ok {
        Ok(())
    } else {
        Err(format!("invalid {kind} id '{id}': ids must match [A-Za-z][A-Za-z0-9_.]*"))
    }
}

/// Incidence matrix K (buses x lines): +1 where the line starts, -1 where it
/// ends, 0 elsewhere. Every column holds exactly one +1 and one -1.
pub fn incidence_matrix(net: &Network) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(net.n_buses(), net.n_lines());
    for l in 0..net.n_lines() {
        let (f, t) = net.line_ends(l);
        k[(f, l)] = 1.0;
        k[(t, l)] = -1.0;
    }
    k
}

/// Loads a network from `dir`, expecting weights to sum to one year (8760 h).
pub fn load_network(dir: impl AsRef<Path>) -> Result<Network, NetworkError> {
    load_network_with_period(dir, DEFAULT_PERIOD_HOURS)
}

/// Loads a network whose snapshot weights must sum to `period_hours`.
///
/// Expected files: `buses.csv`, `lines.csv`, `generators.csv`,
/// `snapshots.csv`, `loads.csv` (wide: snapshot column plus one column per
/// bus), `availability.csv` (wide: snapshot column plus one column per
/// generator). Buses without a load column carry zero demand; generators
/// without an availability column are fully available.
pub fn load_network_with_period(dir: impl AsRef<Path>, period_hours: f64) -> Result<Network, NetworkError> {
    let dir = dir.as_ref();

    let buses = read_buses(&dir.join("buses.csv"))?;
    let lines = read_lines(&dir.join("lines.csv"))?;
    let generators = read_generators(&dir.join("generators.csv"))?;
    let snapshots = read_snapshots(&dir.join("snapshots.csv"))?;

    let bus_ids: Vec<&str> = buses.iter().map(|b| b.id.as_str()).collect();
    let gen_ids: Vec<&str> = generators.iter().map(|g| g.id.as_str()).collect();
    let snap_labels: Vec<&str> = snapshots.iter().map(|s| s.label.as_str()).collect();

    let loads = read_series_table(&dir.join("loads.csv"), &bus_ids, &snap_labels, 0.0, "bus")?;
    let availability = read_series_table(&dir.join("availability.csv"), &gen_ids, &snap_labels, 1.0, "generator")?;

    Network::new(buses, lines, generators, snapshots, loads, availability, period_hours)
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, NetworkError> {
    if !path.exists() {
        return Err(NetworkError::MissingFile(path.to_path_buf()));
    }
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| NetworkError::File { file: file_name(path), msg: e.to_string() })
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

struct Table {
    file: String,
    headers: Vec<String>,
    rows: Vec<(usize, Vec<String>)>, // (1-based file row, fields)
}

fn read_table(path: &Path) -> Result<Table, NetworkError> {
    let mut rdr = open_reader(path)?;
    let file = file_name(path);
    let headers = rdr
        .headers()
        .map_err(|e| NetworkError::File { file: file.clone(), msg: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| NetworkError::Row { file: file.clone(), row: i + 2, msg: e.to_string() })?;
        rows.push((i + 2, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { file, headers, rows })
}

impl Table {
    fn col(&self, name: &str) -> Result<usize, NetworkError> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| NetworkError::File {
            file: self.file.clone(),
            msg: format!("missing required column '{name}'"),
        })
    }
    fn opt_col(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }
    fn get<'a>(&self, row: &'a (usize, Vec<String>), c: usize) -> &'a str {
        row.1.get(c).map(String::as_str).unwrap_or("")
    }
    fn f64(&self, row: &(usize, Vec<String>), c: usize) -> Result<f64, NetworkError> {
        let raw = self.get(row, c);
        raw.parse().map_err(|_| NetworkError::Row {
            file: self.file.clone(),
            row: row.0,
            msg: format!("non-numeric value '{}' in column '{}'", raw, self.headers[c]),
        })
    }
    fn opt_f64(&self, row: &(usize, Vec<String>), c: Option<usize>) -> Result<Option<f64>, NetworkError> {
        match c {
            None => Ok(None),
            Some(c) => {
                let raw = self.get(row, c);
                if raw.is_empty() {
                    Ok(None)
                } else {
                    self.f64(row, c).map(Some)
                }
            }
        }
    }
    fn bool(&self, row: &(usize, Vec<String>), c: usize) -> Result<bool, NetworkError> {
        match self.get(row, c).to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            raw => Err(NetworkError::Row {
                file: self.file.clone(),
                row: row.0,
                msg: format!("expected boolean in column '{}', got '{raw}'", self.headers[c]),
            }),
        }
    }
}

fn read_buses(path: &Path) -> Result<Vec<Bus>, NetworkError> {
    let t = read_table(path)?;
    let id = t.col("id")?;
    let name = t.opt_col("name");
    let x = t.opt_col("x");
    let y = t.opt_col("y");
    t.rows
        .iter()
        .map(|r| {
            Ok(Bus {
                id: t.get(r, id).to_string(),
                name: name.map(|c| t.get(r, c)).filter(|s| !s.is_empty()).map(str::to_string),
                x: t.opt_f64(r, x)?,
                y: t.opt_f64(r, y)?,
            })
        })
        .collect()
}

fn read_lines(path: &Path) -> Result<Vec<Line>, NetworkError> {
    let t = read_table(path)?;
    let (id, from, to) = (t.col("id")?, t.col("from_bus")?, t.col("to_bus")?);
    let (x, patl) = (t.col("reactance_pu")?, t.col("patl_mw")?);
    t.rows
        .iter()
        .map(|r| {
            Ok(Line {
                id: t.get(r, id).to_string(),
                from_bus: t.get(r, from).to_string(),
                to_bus: t.get(r, to).to_string(),
                reactance: t.f64(r, x)?,
                patl: t.f64(r, patl)?,
            })
        })
        .collect()
}

fn read_generators(path: &Path) -> Result<Vec<Generator>, NetworkError> {
    let t = read_table(path)?;
    let id = t.col("id")?;
    let bus = t.col("bus")?;
    let capital = t.col("capital_cost_eur_per_mw_a")?;
    let marginal = t.col("marginal_cost_eur_per_mwh")?;
    let cap = t.col("max_capacity_mw")?;
    let ef = t.col("emission_factor_t_per_mwh")?;
    let eta = t.col("efficiency")?;
    let ext = t.col("extendable")?;
    t.rows
        .iter()
        .map(|r| {
            Ok(Generator {
                id: t.get(r, id).to_string(),
                bus: t.get(r, bus).to_string(),
                capital_cost: t.f64(r, capital)?,
                marginal_cost: t.f64(r, marginal)?,
                max_capacity: t.f64(r, cap)?,
                emission_factor: t.f64(r, ef)?,
                efficiency: t.f64(r, eta)?,
                extendable: t.bool(r, ext)?,
            })
        })
        .collect()
}

fn read_snapshots(path: &Path) -> Result<Vec<Snapshot>, NetworkError> {
    let t = read_table(path)?;
    let (label, w) = (t.col("snapshot")?, t.col("weight_hours")?);
    t.rows
        .iter()
        .map(|r| Ok(Snapshot { label: t.get(r, label).to_string(), weight: t.f64(r, w)? }))
        .collect()
}

/// Reads a wide series table: first column the snapshot label, remaining
/// columns one entity each. Returns rows aligned with `entity_ids`; entities
/// without a column get `default`. Unknown columns are an error.
fn read_series_table(
    path: &Path,
    entity_ids: &[&str],
    snap_labels: &[&str],
    default: f64,
    entity_kind: &str,
) -> Result<Vec<Vec<f64>>, NetworkError> {
    let t = read_table(path)?;
    if t.headers.is_empty() || t.headers[0] != "snapshot" {
        return Err(NetworkError::File {
            file: t.file.clone(),
            msg: "first column must be 'snapshot'".into(),
        });
    }
    let mut col_of = HashMap::new();
    for (c, h) in t.headers.iter().enumerate().skip(1) {
        let idx = entity_ids.iter().position(|id| id == h).ok_or_else(|| NetworkError::File {
            file: t.file.clone(),
            msg: format!("column '{h}' does not match any {entity_kind} id"),
        })?;
        col_of.insert(idx, c);
    }
    if t.rows.len() != snap_labels.len() {
        return Err(NetworkError::File {
            file: t.file.clone(),
            msg: format!("{} rows for {} snapshots; series must share the snapshot index", t.rows.len(), snap_labels.len()),
        });
    }
    let mut out = Vec::with_capacity(t.rows.len());
    for (ti, r) in t.rows.iter().enumerate() {
        let label = t.get(r, 0);
        if label != snap_labels[ti] {
            return Err(NetworkError::Row {
                file: t.file.clone(),
                row: r.0,
                msg: format!("snapshot '{label}' does not match snapshots.csv order (expected '{}')", snap_labels[ti]),
            });
        }
        let mut row = vec![default; entity_ids.len()];
        for (idx, &c) in &col_of {
            row[*idx] = t.f64(r, c)?;
        }
        out.push(row);
    }
    Ok(out)
}

/// Writes a network back to the same CSV layout `load_network` reads.
/// `load_network_with_period(dir, net.period_hours)` restores it exactly.
pub fn write_network(net: &Network, dir: impl AsRef<Path>) -> Result<(), NetworkError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| NetworkError::Io { path: dir.to_path_buf(), source: e })?;
    let write = |name: &str, body: String| -> Result<(), NetworkError> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| NetworkError::Io { path, source: e })
    };

    let mut s = String::from("id,name,x,y\n");
    for b in &net.buses {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            b.id,
            b.name.as_deref().unwrap_or(""),
            b.x.map(|v| v.to_string()).unwrap_or_default(),
            b.y.map(|v| v.to_string()).unwrap_or_default()
        );
    }
    write("buses.csv", s)?;

    let mut s = String::from("id,from_bus,to_bus,reactance_pu,patl_mw\n");
    for l in &net.lines {
        let _ = writeln!(s, "{},{},{},{},{}", l.id, l.from_bus, l.to_bus, l.reactance, l.patl);
    }
    write("lines.csv", s)?;

    let mut s = String::from(
        "id,bus,capital_cost_eur_per_mw_a,marginal_cost_eur_per_mwh,max_capacity_mw,emission_factor_t_per_mwh,efficiency,extendable\n",
    );
    for g in &net.generators {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            g.id, g.bus, g.capital_cost, g.marginal_cost, g.max_capacity, g.emission_factor, g.efficiency, g.extendable
        );
    }
    write("generators.csv", s)?;

    let mut s = String::from("snapshot,weight_hours\n");
    for sn in &net.snapshots {
        let _ = writeln!(s, "{},{}", sn.label, sn.weight);
    }
    write("snapshots.csv", s)?;

    let mut s = String::from("snapshot");
    for b in &net.buses {
        let _ = write!(s, ",{}", b.id);
    }
    s.push('\n');
    for (t, sn) in net.snapshots.iter().enumerate() {
        let _ = write!(s, "{}", sn.label);
        for i in 0..net.n_buses() {
            let _ = write!(s, ",{}", net.loads[t][i]);
        }
        s.push('\n');
    }
    write("loads.csv", s)?;

    let mut s = String::from("snapshot");
    for g in &net.generators {
        let _ = write!(s, ",{}", g.id);
    }
    s.push('\n');
    for (t, sn) in net.snapshots.iter().enumerate() {
        let _ = write!(s, "{}", sn.label);
        for g in 0..net.n_generators() {
            let _ = write!(s, ",{}", net.availability[t][g]);
        }
        s.push('\n');
    }
    write("availability.csv", s)?;

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
    }

    #[test]
    fn triangle_fixture_loads_with_expected_counts() {
        let net = load_network(fixture("triangle")).unwrap();
        assert_eq!(net.n_buses(), 3);
        assert_eq!(net.n_lines(), 3);
        assert_eq!(net.n_generators(), 2);
        assert_eq!(net.n_snapshots(), 1);
        assert_eq!(net.demand(net.bus_index("B").unwrap(), 0), 100.0);
        // gas plant carries default availability 1.0 (no column needed)
        let ga = net.generator_index("gen_a").unwrap();
        assert_eq!(net.availability_of(ga, 0), 1.0);
    }

    #[test]
    fn unknown_bus_reference_is_reported_with_context() {
        let dir = tempfile::tempdir().unwrap();
        let net = load_network(fixture("triangle")).unwrap();
        write_network(&net, dir.path()).unwrap();
        std::fs::write(
            dir.path().join("lines.csv"),
            "id,from_bus,to_bus,reactance_pu,patl_mw\nAB,A,Z9,1.0,80\n",
        )
        .unwrap();
        let err = load_network(dir.path()).unwrap_err().to_string();
        assert!(err.contains("unknown bus 'Z9'"), "{err}");
    }

    #[test]
    fn weight_sum_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let net = load_network(fixture("triangle")).unwrap();
        write_network(&net, dir.path()).unwrap();
        std::fs::write(dir.path().join("snapshots.csv"), "snapshot,weight_hours\nh0,100\n").unwrap();
        let err = load_network(dir.path()).unwrap_err().to_string();
        assert!(err.contains("weights must sum to period length"), "{err}");
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let net = load_network(fixture("triangle")).unwrap();
        let mut buses = net.buses.clone();
        buses.push(Bus { id: "D".into(), name: None, x: None, y: None });
        let mut loads = net.loads.clone();
        loads[0].push(0.0);
        let err = Network::new(
            buses,
            net.lines.clone(),
            net.generators.clone(),
            net.snapshots.clone(),
            loads,
            net.availability.clone(),
            net.period_hours,
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::Disconnected { .. }), "{err}");
    }

    #[test]
    fn roundtrip_write_then_load_is_identical() {
        for name in ["triangle", "two_zone"] {
            let net = load_network(fixture(name)).unwrap();
            let dir = tempfile::tempdir().unwrap();
            write_network(&net, dir.path()).unwrap();
            let back = load_network(dir.path()).unwrap();
            assert_eq!(net, back, "roundtrip mismatch for {name}");
        }
    }

    #[test]
    fn incidence_columns_hold_one_plus_and_one_minus() {
        let net = load_network(fixture("triangle")).unwrap();
        let k = incidence_matrix(&net);
        // first line A->B: +1 at A, -1 at B
        let ab = net.line_index("AB").unwrap();
        let (a, b) = (net.bus_index("A").unwrap(), net.bus_index("B").unwrap());
        assert_eq!(k[(a, ab)], 1.0);
        assert_eq!(k[(b, ab)], -1.0);
        for l in 0..net.n_lines() {
            let col: Vec<f64> = (0..net.n_buses()).map(|i| k[(i, l)]).collect();
            assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|&&v| v == -1.0).count(), 1);
            assert_eq!(col.iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn duplicate_ids_and_bad_values_are_rejected() {
        let net = load_network(fixture("triangle")).unwrap();
        let mut lines = net.lines.clone();
        lines.push(lines[0].clone());
        let err = Network::new(
            net.buses.clone(),
            lines,
            net.generators.clone(),
            net.snapshots.clone(),
            net.loads.clone(),
            net.availability.clone(),
            net.period_hours,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("duplicate line id"), "{err}");

        let mut bad = net.lines.clone();
        bad[0].reactance = 0.0;
        let err = Network::new(
            net.buses.clone(),
            bad,
            net.generators.clone(),
            net.snapshots.clone(),
            net.loads.clone(),
            net.availability.clone(),
            net.period_hours,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("reactance"), "{err}");
    }

    #[test]
    fn ids_usable_in_variable_names_only() {
        assert!(check_id("bus", "N1").is_ok());
        assert!(check_id("bus", "wind_n1.a").is_ok());
        assert!(check_id("bus", "1abc").is_err());
        assert!(check_id("bus", "a b").is_err());
        assert!(check_id("bus", "a/b").is_err());
        assert!(check_id("bus", "inf").is_err());
        assert!(check_id("bus", "").is_err());
    }

    #[test]
    fn non_numeric_field_names_file_and_row() {
        let dir = tempfile::tempdir().unwrap();
        let net = load_network(fixture("triangle")).unwrap();
        write_network(&net, dir.path()).unwrap();
        std::fs::write(
            dir.path().join("lines.csv"),
            "id,from_bus,to_bus,reactance_pu,patl_mw\nAB,A,B,oops,80\n",
        )
        .unwrap();
        let err = load_network(dir.path()).unwrap_err().to_string();
        assert!(err.contains("lines.csv") && err.contains("row 2") && err.contains("oops"), "{err}");
    }
}
