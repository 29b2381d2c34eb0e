//! Thin command-line wrapper around the library: one scenario (`run`), a
//! parameter sweep (`sweep`), or a three-strategy comparison (`compare`).
//! Exit codes: 0 solved and verified, 2 infeasible, 3 verification or
//! dominance failure, 1 anything else.

use clap::{Args, Parser, Subcommand};

use std::path::PathBuf;

use netboost::planning::ModelKind;
use netboost::scenario::{
    apply_overrides, compare_strategies, dump_sensitivities, load_config, load_study_network,
    run_scenario, run_sweep, Overrides, RunOptions, ScenarioError, SweepAxis, SweepSpec,
};

#[derive(Parser)]
#[command(name = "netboost", version, about = "Generation and network-booster capacity planning under N-1 security")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write every solver stage as LP-format text under OUT/lp/ (run only).
    #[arg(long, global = true)]
    dump_lp: bool,
    /// Write the PTDF and LODF matrices as CSV under OUT.
    #[arg(long, global = true)]
    dump_sensitivities: bool,
    /// Seed override for randomized steps such as typical-hour selection.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario, verify it, and write the plan files.
    Run {
        #[command(flatten)]
        io: IoArgs,
        /// Planning model: preventive, sequential, or simultaneous.
        #[arg(long)]
        model: Option<ModelKind>,
        #[command(flatten)]
        tune: TuneArgs,
    },
    /// Solve one model family along a parameter axis and tabulate the costs.
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        /// Swept parameter: co2, tatl, or nbcost.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values, for example 1.0,1.1,1.3.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Models to solve at every value.
        #[arg(
            long,
            value_delimiter = ',',
            default_values_t = [ModelKind::Preventive, ModelKind::Sequential, ModelKind::Simultaneous]
        )]
        models: Vec<ModelKind>,
        #[command(flatten)]
        tune: TuneArgs,
    },
    /// Cost all three strategies on one study (preventive at strict N-1).
    Compare {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tune: TuneArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Directory with buses/lines/generators/loads/availability/snapshots CSV files.
    #[arg(long)]
    network: PathBuf,
    /// Scenario config as TOML.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Config values that may be overridden without editing the file.
#[derive(Args)]
struct TuneArgs {
    /// Temporarily admissible loading as a multiple of the permanent rating.
    #[arg(long)]
    tatl_factor: Option<f64>,
    /// Emission reduction fraction against the configured baseline.
    #[arg(long)]
    co2_reduction: Option<f64>,
    /// Booster capital cost in EUR/MW/a, applied to both directions.
    #[arg(long)]
    nb_cost: Option<f64>,
}

impl TuneArgs {
    fn overrides(&self, model: Option<ModelKind>, seed: Option<u64>) -> Overrides {
        Overrides {
            model,
            tatl_factor: self.tatl_factor,
            co2_reduction: self.co2_reduction,
            nb_cost: self.nb_cost,
            seed,
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), ScenarioError> {
    let opts = RunOptions { dump_lp: cli.dump_lp, dump_sensitivities: cli.dump_sensitivities };
    match cli.command {
        Command::Run { io, model, tune } => {
            let mut cfg = load_config(&io.config)?;
            apply_overrides(&mut cfg, &tune.overrides(model, cli.seed));
            let arts = run_scenario(&io.network, &cfg, &io.out, &opts)?;
            print!("{}", arts.report.render());
            let cost = &arts.solved.plan.cost_report;
            let (up, dn) = arts.solved.plan.total_nb_capacity();
            println!(
                "model {}  objective {:.2} EUR/a  (generation capital {:.2}, operation {:.2}, booster capital {:.2}, booster operation {:.2})",
                arts.solved.plan.model,
                arts.solved.objective(),
                cost.capital_generation,
                cost.operation_generation,
                cost.nb_capital,
                cost.nb_operation,
            );
            println!("booster capacity: {up:.2} MW up, {dn:.2} MW down");
            println!("files written to {}", io.out.display());
            Ok(())
        }
        Command::Sweep { io, axis, values, models, tune } => {
            let mut base = load_config(&io.config)?;
            apply_overrides(&mut base, &tune.overrides(None, cli.seed));
            let spec = SweepSpec { axis, values, base, models };
            let rows = run_sweep(&io.network, &spec, &io.out)?;
            maybe_dump(&opts, &io, &spec.base)?;
            let failed = rows.iter().filter(|r| r.summary.status != "ok").count();
            if failed > 0 {
                log::warn!("{failed} of {} sweep points failed; see summary.csv", rows.len());
            }
            print!("{}", netboost::scenario::sweep_csv(&spec, &rows));
            println!("table written to {}", io.out.join("summary.csv").display());
            Ok(())
        }
        Command::Compare { io, tune } => {
            let mut cfg = load_config(&io.config)?;
            apply_overrides(&mut cfg, &tune.overrides(None, cli.seed));
            let cmp = compare_strategies(&io.network, &cfg, &io.out)?;
            maybe_dump(&opts, &io, &cfg)?;
            print!("{}", cmp.render());
            println!("table written to {}", io.out.join("comparison.csv").display());
            Ok(())
        }
    }
}

/// Sweep and compare accept the sensitivity dump (one network, one dump);
/// per-point LP dumps stay a `run` feature.
fn maybe_dump(
    opts: &RunOptions,
    io: &IoArgs,
    cfg: &netboost::planning::ScenarioConfig,
) -> Result<(), ScenarioError> {
    if opts.dump_lp {
        log::warn!("--dump-lp applies to `run` only and was ignored");
    }
    if opts.dump_sensitivities {
        let net = load_study_network(&io.network)?;
        dump_sensitivities(&net, cfg, &io.out)?;
    }
    Ok(())
}
