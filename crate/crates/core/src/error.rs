use thiserror::Error;

/// Errors produced by model validation, solvers, oracles and the simulator.
///
/// Task indices carried by variants are 0-based; `Display` renders them
/// 1-based to match serialized forms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {reason}")]
    InvalidParams { reason: String },

    #[error("invalid instance: {reason}")]
    InvalidInstance { reason: String },

    #[error(
        "infeasible instance: {count} arrivals in window [{window_start}, {window_end}) exceed the cap of {cap}"
    )]
    Infeasible {
        window_start: i64,
        window_end: i64,
        count: usize,
        cap: usize,
    },

    #[error("schedule infeasible at task {}: {reason}", task + 1)]
    ScheduleInfeasible { task: usize, reason: String },

    #[error("invalid schedule: {reason}")]
    InvalidSchedule { reason: String },

    #[error("task {} misses its deadline: departs at {departure}, deadline {deadline}", task + 1)]
    DeadlineMiss {
        task: usize,
        departure: f64,
        deadline: i64,
    },

    #[error("arrival at {arrival} is not before the scheduled wake-up at {scheduled}")]
    ArrivalAfterWake { arrival: i64, scheduled: i64 },

    #[error("no feasible AP start for task {}", task + 1)]
    NoFeasibleStart { task: usize },

    #[error("instance with {n} tasks exceeds the brute-force limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid_params(reason: impl Into<String>) -> Error {
    Error::InvalidParams {
        reason: reason.into(),
    }
}
