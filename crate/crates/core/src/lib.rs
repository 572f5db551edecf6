//! Sound forward reachability for discrete-time systems with ReLU network
//! controllers, with a scheduler that trades symbolic query depth against a
//! time budget.
//!
//! ```no_run
//! use hsreach_core::{fixtures, refined_reach, BoundPropagation, Budget, Query, WallClock};
//!
//! let f = fixtures::pendulum();
//! let mut q = Query::new(f.system, f.horizon).unwrap();
//! let (sets, log) = refined_reach(&mut q, &f.initial_set, Budget::Seconds(2.0),
//!     &BoundPropagation, &mut WallClock::new()).unwrap();
//! assert_eq!(sets.len(), log.records().iter().map(|r| r.pushed.len()).sum::<usize>());
//! ```

pub mod bounder;
mod error;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod scheduler;

pub use bounder::{
    interval_eval, network_bounds, symbolic_reach, BoundPropagation, IntermediateMode, Interval, Query, QueryData,
    QueryRecord, QueryStatus, ReachBackend,
};
pub use error::{Error, Result};
pub use geometry::Hyperrect;
pub use model::{fixtures, load_system, parse_expr, parse_network, parse_system, NeuralNet, SystemFile, SystemSpec};
pub use oracle::{audit_soundness, error_per_step, error_total, sample_hulls, ErrorMetric, ErrorReport, Violation};
pub use scheduler::{
    calc_steps, naive_reach, refined_reach, run_fixed_schedule, Budget, Clock, CostModel, Phase, ScheduleLog,
    ScheduleRecord, SchedulerState, SimulatedClock, WallClock,
};
