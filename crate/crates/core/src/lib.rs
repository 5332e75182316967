//! Energy-optimal ON-OFF control of a single server that must finish every
//! task within a relative deadline.
//!
//! A task arriving at `a_j` needs `beta` ticks of service and must depart by
//! `a_j + d`. Waking the server costs `c_wake`, serving costs `c_busy` per
//! tick and idling costs `c_idle` per tick. The crate provides
//!
//! - [`model`]: parameters, instances, schedules and cost evaluation;
//! - [`wakeup`]: the latest feasible start of an active period, off-line and
//!   on-line;
//! - [`offline`]: the exact dynamic program over sleep/stay decisions;
//! - [`online`]: deterministic, randomized and naive sleep controllers and
//!   their competitive ratios;
//! - [`sim`]: an event-driven simulator and instance generators;
//! - [`oracle`]: brute-force reference implementations for testing;
//! - [`experiments`]: batch sweeps that emit CSV.
//!
//! ```
//! use onoff_sched::{solve_offline, Problem, SystemParams};
//!
//! let p = SystemParams::new(1, 10, 10.0, 1.0, 1.0).unwrap();
//! let problem = Problem::from_arrivals(p, vec![0, 19, 29]).unwrap();
//! let sol = solve_offline(&problem).unwrap();
//! assert_eq!(sol.schedule.to_string(), "[[9,10],[28,30]]");
//! assert_eq!(sol.cost.total, 23.0);
//! ```

pub mod error;
pub mod experiments;
pub mod model;
pub mod offline;
pub mod online;
pub mod oracle;
pub mod sim;
pub mod wakeup;

pub use error::{Error, Result};
pub use model::{
    check_feasibility, compute_departures, evaluate_schedule, ActivePeriod, ArrivalInstance,
    CostBreakdown, Problem, Schedule, SystemParams, COST_TOLERANCE,
};
pub use offline::{solve_offline, OfflineSolution};
pub use online::{competitive_ratio_bound, SleepPolicy};
pub use sim::{simulate, simulate_policy, Controller, SimTrace};
pub use wakeup::{optimal_ap_start, WakeupState};
