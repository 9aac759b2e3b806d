//! Trajectory tracking for a unicycle robot under matched and unmatched
//! disturbances.
//!
//! [`observers`] estimates the disturbance with an adaptive sliding-mode
//! observer, and [`controllers`] feeds the estimate to a backstepping law that
//! keeps each tracking error inside a shrinking envelope. [`runner`] closes
//! the loop at a fixed step and compares it against PID or sliding-mode
//! control and against an extended-state observer.
//!
//! ```
//! use atcr_core::{run_scenario, RunConfig};
//!
//! let mut cfg = RunConfig::default();
//! cfg.sim.t_final = 1.0;
//! let run = run_scenario(&cfg).unwrap();
//! assert!(run.events.is_empty());
//! ```

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod controllers;
pub mod error;
pub mod metrics;
pub mod observers;
pub mod runner;
pub mod scenarios;
pub mod sim;

pub use config::{load_config, ControllerKind, ObserverKind, RunConfig};
pub use controllers::{EnvelopeParams, PidGains, PpcGains, SmcGains, TrackingController};
pub use error::{Error, Result};
pub use metrics::{box_stats, convergence_time, finite_time_bound, summarize, ErrorSummary};
pub use observers::{AsmdobGains, DisturbanceObserver, EsoGains};
pub use runner::{compare, run_scenario, RunResult, TraceRow, Variant};
pub use scenarios::{DisturbanceProfile, DisturbanceSpec, Reference, ScenarioSpec};
pub use sim::{ControlInput, DisturbanceVec, Integrator, RobotPose, SimConfig};
