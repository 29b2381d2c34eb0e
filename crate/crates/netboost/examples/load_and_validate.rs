//! Loads a bundled network directory, prints what was found, and shows the
//! kind of error a broken directory produces.

use netboost::network::{incidence_matrix, load_network};

use std::path::{Path, PathBuf};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() -> anyhow::Result<()> {
    let net = load_network(fixture("triangle"))?;
    println!(
        "triangle: {} buses, {} lines, {} generators, {} snapshots over {} h",
        net.n_buses(),
        net.n_lines(),
        net.n_generators(),
        net.n_snapshots(),
        net.period_hours,
    );
    for line in &net.lines {
        println!(
            "  line {:>3}  {} -> {}  x = {} pu, rating {} MW",
            line.id, line.from_bus, line.to_bus, line.reactance, line.patl
        );
    }

    // Every incidence column holds one +1 (sending end) and one -1
    // (receiving end); everything downstream leans on that convention.
    let k = incidence_matrix(&net);
    println!("incidence matrix ({} x {}):", k.nrows(), k.ncols());
    for i in 0..k.nrows() {
        let row: Vec<String> = (0..k.ncols()).map(|l| format!("{:>4}", k[(i, l)])).collect();
        println!("  {} [{}]", net.buses[i].id, row.join(" "));
    }

    // A directory with a dangling bus reference refuses to load.
    let broken = tempfile::tempdir()?;
    for f in ["buses.csv", "generators.csv", "loads.csv", "availability.csv", "snapshots.csv"] {
        std::fs::copy(fixture("triangle").join(f), broken.path().join(f))?;
    }
    std::fs::write(
        broken.path().join("lines.csv"),
        "id,from_bus,to_bus,reactance_pu,patl_mw\nAB,A,Z9,1.0,80\nBC,B,C,1.0,120\nAC,A,C,1.0,120\n",
    )?;
    match load_network(broken.path()) {
        Err(e) => println!("broken directory rejected as expected: {e}"),
        Ok(_) => anyhow::bail!("unknown bus reference was accepted"),
    }
    Ok(())
}
