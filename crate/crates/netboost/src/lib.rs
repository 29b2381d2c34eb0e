//! Planning toolkit for electricity generation and fast corrective
//! flexibility ("network boosters") under N-1 transmission security.
//!
//! The crate models a transmission grid with a linearized (DC) power flow,
//! derives the standard sensitivity matrices (PTDF, LODF), and builds three
//! linear programs that trade preventive against corrective security:
//!
//! * **preventive** - generation capacities are sized so that no line exceeds
//!   its permanent rating after any single line outage, with no corrective
//!   action at all;
//! * **sequential** - generation is sized first against a relaxed, temporary
//!   post-outage rating, then booster capacities (fast injections/absorptions
//!   at buses) are placed in a second stage to bring every post-outage flow
//!   back below the permanent rating;
//! * **simultaneous** - both investment layers are co-optimized in one LP.
//!
//! Every solved plan is re-audited from first principles ([`planning::verify_plan`])
//! instead of trusting the solver's claim.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example load_and_validate
//! cargo run --example dc_sensitivities
//! cargo run --example contingency_oracle
//! cargo run --example preventive_plan
//! cargo run --example sequential_plan
//! cargo run --example simultaneous_plan
//! cargo run --example verify_audit
//! cargo run --example typical_hours
//! cargo run --example tatl_sweep
//! cargo run --example strategy_comparison
//! ```
//!
//! A thin CLI (`netboost run|sweep|compare`) wraps the same library calls for
//! scripted studies; see [`scenario`].

pub mod lp;
pub mod network;
pub mod planning;
pub mod scenario;
pub mod sensitivity;
pub mod snapshots;
pub mod synthetic;

pub use network::{load_network, Network};
pub use planning::{solve_plan, verify_plan, ModelKind, PlanResult, ScenarioConfig};
pub use sensitivity::SensitivitySet;
pub use snapshots::{reduce_series_dir, reduce_snapshots, FeatureMatrix, Reduction};
