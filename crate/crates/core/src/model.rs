//! System parameters, arrival instances, schedules and exact cost evaluation.
//!
//! Time is measured in integer ticks. A task takes `beta` ticks to serve and
//! must depart within `d` ticks of its arrival. Costs are real numbers: a
//! fixed `c_wake` per OFF→ON transition, `c_busy` per tick spent serving and
//! `c_idle` per tick spent ON with an empty queue.
//!
//! Task indices are 0-based in the API and 1-based in every serialized form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_params, Error, Result};

/// Absolute tolerance used when comparing costs.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Service time, relative deadline and the three cost coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Ticks needed to serve one task (B/R).
    pub beta: i64,
    /// Relative deadline in ticks.
    pub d: i64,
    pub c_wake: f64,
    pub c_busy: f64,
    pub c_idle: f64,
}

impl SystemParams {
    pub fn new(beta: i64, d: i64, c_wake: f64, c_busy: f64, c_idle: f64) -> Result<Self> {
        Self {
            beta,
            d,
            c_wake,
            c_busy,
            c_idle,
        }
        .validate()
    }

    /// Returns `self` unchanged iff every parameter invariant holds.
    ///
    /// `c_idle == 0` is accepted here; operations that divide by it
    /// ([`CompetitiveParams`](crate::online::CompetitiveParams)) reject it
    /// themselves.
    pub fn validate(self) -> Result<Self> {
        if self.beta < 1 {
            return Err(invalid_params(format!("beta = {} must be >= 1", self.beta)));
        }
        if self.d < self.beta {
            return Err(invalid_params(format!(
                "d = {} must be >= beta = {}",
                self.d, self.beta
            )));
        }
        if self.d / self.beta <= 1 {
            return Err(invalid_params(format!(
                "floor(d / beta) = {} must be > 1",
                self.d / self.beta
            )));
        }
        for (name, v) in [
            ("c_wake", self.c_wake),
            ("c_busy", self.c_busy),
            ("c_idle", self.c_idle),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid_params(format!(
                    "{name} = {v} must be finite and >= 0"
                )));
            }
        }
        if self.c_idle > self.c_busy {
            return Err(invalid_params(format!(
                "c_idle = {} must not exceed c_busy = {}",
                self.c_idle, self.c_busy
            )));
        }
        Ok(self)
    }

    /// Maximum number of arrivals allowed in any window of `d` ticks.
    pub fn capacity(&self) -> usize {
        (self.d / self.beta) as usize
    }

    /// Idle length beyond which sleeping and waking again is cheaper than
    /// staying ON: `c_wake / c_idle`. Infinite when idling is free.
    pub fn sleep_threshold(&self) -> f64 {
        if self.c_idle > 0.0 {
            self.c_wake / self.c_idle
        } else if self.c_wake > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    /// Cost of serving a single task.
    pub fn service_cost(&self) -> f64 {
        self.c_busy * self.beta as f64
    }
}

/// Free-function form of [`SystemParams::validate`].
pub fn validate_params(p: SystemParams) -> Result<SystemParams> {
    p.validate()
}

/// Nondecreasing arrival times `a_1..a_N`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ArrivalInstance(Vec<i64>);

impl ArrivalInstance {
    pub fn new(arrivals: Vec<i64>) -> Result<Self> {
        if let Some(i) = arrivals.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidInstance {
                reason: format!(
                    "arrivals must be nondecreasing: a_{} = {} > a_{} = {}",
                    i + 1,
                    arrivals[i],
                    i + 2,
                    arrivals[i + 1]
                ),
            });
        }
        Ok(Self(arrivals))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }
}

impl<'de> Deserialize<'de> for ArrivalInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(de)?;
        ArrivalInstance::new(v).map_err(serde::de::Error::custom)
    }
}

/// The first window `[start, start + d)` holding more than `capacity`
/// arrivals, as `(start, count)`.
///
/// Only windows opening at an arrival need testing: sliding a window right
/// until its left edge hits an arrival never loses an arrival from it.
pub fn find_overloaded_window(inst: &ArrivalInstance, p: &SystemParams) -> Option<(i64, usize)> {
    let a = inst.as_slice();
    let cap = p.capacity();
    for (i, &start) in a.iter().enumerate() {
        let j = i + cap;
        if j < a.len() && a[j] < start + p.d {
            let count = a[i..].partition_point(|&t| t < start + p.d);
            return Some((start, count));
        }
    }
    None
}

/// True iff every half-open window of `d` ticks holds at most
/// `floor(d / beta)` arrivals.
pub fn check_feasibility(inst: &ArrivalInstance, p: &SystemParams) -> bool {
    find_overloaded_window(inst, p).is_none()
}

/// Validated parameters paired with a feasible arrival instance.
///
/// Infeasible instances are rejected here rather than scheduled best-effort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile")]
pub struct Problem {
    params: SystemParams,
    arrivals: ArrivalInstance,
}

#[derive(Deserialize)]
struct ProblemFile {
    params: SystemParams,
    arrivals: ArrivalInstance,
}

impl TryFrom<ProblemFile> for Problem {
    type Error = Error;

    fn try_from(f: ProblemFile) -> Result<Self> {
        Problem::new(f.params, f.arrivals)
    }
}

impl Problem {
    pub fn new(params: SystemParams, arrivals: ArrivalInstance) -> Result<Self> {
        let params = params.validate()?;
        if let Some((start, count)) = find_overloaded_window(&arrivals, &params) {
            return Err(Error::Infeasible {
                window_start: start,
                window_end: start + params.d,
                count,
                cap: params.capacity(),
            });
        }
        Ok(Self { params, arrivals })
    }

    pub fn from_arrivals(params: SystemParams, arrivals: Vec<i64>) -> Result<Self> {
        Self::new(params, ArrivalInstance::new(arrivals)?)
    }

    /// Reads `{"params": {..}, "arrivals": [..]}`. Unlike plain
    /// deserialization, validation failures keep their own error variant.
    pub fn from_json_reader(r: impl std::io::Read) -> Result<Self> {
        let f: ProblemFile = serde_json::from_reader(r)?;
        Self::try_from(f)
    }

    /// Same arrivals under different parameters (feasibility re-checked).
    pub fn with_params(&self, params: SystemParams) -> Result<Self> {
        Self::new(params, self.arrivals.clone())
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn arrivals(&self) -> &[i64] {
        self.arrivals.as_slice()
    }

    pub fn instance(&self) -> &ArrivalInstance {
        &self.arrivals
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn arrival(&self, task: usize) -> i64 {
        self.arrivals.0[task]
    }

    pub fn deadline(&self, task: usize) -> i64 {
        self.arrivals.0[task] + self.params.d
    }
}

/// An interval `[start, end]` during which the system is ON, serving tasks
/// `first_task..=last_task`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ActivePeriodWire", into = "ActivePeriodWire")]
pub struct ActivePeriod {
    pub start: i64,
    pub end: i64,
    pub first_task: usize,
    pub last_task: usize,
}

impl ActivePeriod {
    pub fn task_count(&self) -> usize {
        self.last_task + 1 - self.first_task
    }
}

#[derive(Serialize, Deserialize)]
struct ActivePeriodWire {
    start: i64,
    end: i64,
    first_task: usize,
    last_task: usize,
}

impl TryFrom<ActivePeriodWire> for ActivePeriod {
    type Error = String;

    fn try_from(w: ActivePeriodWire) -> std::result::Result<Self, String> {
        if w.first_task == 0 || w.last_task == 0 {
            return Err("task indices are 1-based".into());
        }
        Ok(Self {
            start: w.start,
            end: w.end,
            first_task: w.first_task - 1,
            last_task: w.last_task - 1,
        })
    }
}

impl From<ActivePeriod> for ActivePeriodWire {
    fn from(ap: ActivePeriod) -> Self {
        Self {
            start: ap.start,
            end: ap.end,
            first_task: ap.first_task + 1,
            last_task: ap.last_task + 1,
        }
    }
}

/// Ordered, disjoint active periods. Its length is the number of wake-ups.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub aps: Vec<ActivePeriod>,
}

impl Schedule {
    pub fn new(aps: Vec<ActivePeriod>) -> Self {
        Self { aps }
    }

    pub fn wakeups(&self) -> usize {
        self.aps.len()
    }

    /// Checks ordering, disjointness and that task ranges partition `0..n`.
    pub fn check_structure(&self, n: usize) -> Result<()> {
        let mut next_task = 0;
        let mut prev_end: Option<i64> = None;
        for (i, ap) in self.aps.iter().enumerate() {
            let bad = |reason: String| Error::InvalidSchedule { reason };
            if ap.start >= ap.end {
                return Err(bad(format!(
                    "AP {} has start {} >= end {}",
                    i + 1,
                    ap.start,
                    ap.end
                )));
            }
            if let Some(e) = prev_end {
                if ap.start <= e {
                    return Err(bad(format!(
                        "AP {} starts at {} before the previous AP ends at {e}",
                        i + 1,
                        ap.start
                    )));
                }
            }
            if ap.first_task != next_task || ap.last_task < ap.first_task {
                return Err(bad(format!(
                    "AP {} serves tasks {}..={}, expected to start at task {}",
                    i + 1,
                    ap.first_task + 1,
                    ap.last_task + 1,
                    next_task + 1
                )));
            }
            next_task = ap.last_task + 1;
            prev_end = Some(ap.end);
        }
        if next_task != n {
            return Err(Error::InvalidSchedule {
                reason: format!("schedule covers {next_task} of {n} tasks"),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, ap) in self.aps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{},{}]", ap.start, ap.end)?;
        }
        write!(f, "]")
    }
}

/// Wake-ups, busy and idle time, and the resulting total cost.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub wakeups: usize,
    pub busy_ticks: i64,
    pub idle_ticks: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn from_parts(p: &SystemParams, wakeups: usize, busy_ticks: i64, idle_ticks: f64) -> Self {
        let total =
            wakeups as f64 * p.c_wake + busy_ticks as f64 * p.c_busy + idle_ticks * p.c_idle;
        Self {
            wakeups,
            busy_ticks,
            idle_ticks,
            total,
        }
    }
}

/// Departure times `x_1..x_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepartureVector {
    pub x: Vec<i64>,
}

/// FIFO departures within each AP: a task starts service at the latest of
/// its arrival, the previous departure in the same AP, and the AP start.
pub fn compute_departures(problem: &Problem, sched: &Schedule) -> Result<DepartureVector> {
    sched.check_structure(problem.len())?;
    let beta = problem.params().beta;
    let mut x = Vec::with_capacity(problem.len());
    for ap in &sched.aps {
        let mut free_at = ap.start;
        for j in ap.first_task..=ap.last_task {
            let begin = free_at.max(problem.arrival(j));
            let done = begin + beta;
            if done > ap.end {
                return Err(Error::ScheduleInfeasible {
                    task: j,
                    reason: format!("departure {done} falls after the AP end {}", ap.end),
                });
            }
            x.push(done);
            free_at = done;
        }
    }
    Ok(DepartureVector { x })
}

/// Exact objective value of `sched`, after checking every deadline.
pub fn evaluate_schedule(problem: &Problem, sched: &Schedule) -> Result<CostBreakdown> {
    let dep = compute_departures(problem, sched)?;
    if let Some((j, &xj)) = dep
        .x
        .iter()
        .enumerate()
        .find(|&(j, &xj)| xj > problem.deadline(j))
    {
        return Err(Error::DeadlineMiss {
            task: j,
            departure: xj as f64,
            deadline: problem.deadline(j),
        });
    }
    let p = problem.params();
    let mut busy = 0;
    let mut idle = 0;
    for ap in &sched.aps {
        let tau = ap.task_count() as i64 * p.beta;
        busy += tau;
        idle += ap.end - ap.start - tau;
    }
    Ok(CostBreakdown::from_parts(
        p,
        sched.wakeups(),
        busy,
        idle as f64,
    ))
}
