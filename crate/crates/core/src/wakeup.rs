//! Latest feasible start of an active period.
//!
//! Starting an AP later never costs more, so the best start for an AP whose
//! first task is `k` is the latest instant that still meets every deadline.
//! Only arrivals in the half-open window `[a_k, d_k - beta)` can pull that
//! instant earlier than `d_k - beta`: for each such task `j` the offset
//! `delta_j = beta * (j - k) - (a_j - a_k)` measures how far back-to-back
//! service from `d_k - beta` would overrun its deadline.
//!
//! The same value is reachable on-line: [`WakeupState`] starts from
//! `a_k + d - beta` and lowers the scheduled wake-up as arrivals are observed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Problem, SystemParams};

/// Latest feasible start for an AP whose first task is `k`.
pub fn optimal_ap_start(problem: &Problem, k: usize) -> i64 {
    let p = problem.params();
    let a = problem.arrivals();
    let a_k = a[k];
    let latest = a_k + p.d - p.beta;
    let worst = a[k + 1..]
        .iter()
        .take_while(|&&t| t < latest)
        .enumerate()
        .map(|(off, &a_j)| p.beta * (off as i64 + 1) - (a_j - a_k))
        .fold(0, i64::max);
    latest - worst
}

/// On-line wake-up bookkeeping for an AP that opens with task `first_task`.
///
/// Invariant: `scheduled_wake` stays in `[a_k, a_k + d - beta]` and never
/// increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WakeupState {
    pub first_task: usize,
    pub first_arrival: i64,
    pub scheduled_wake: i64,
    /// Arrivals seen after the first one while the wake-up was pending.
    pub observed: usize,
}

impl WakeupState {
    /// State right after task `k` arrives at `a_k` to an OFF system.
    pub fn new(first_task: usize, first_arrival: i64, p: &SystemParams) -> Self {
        Self {
            first_task,
            first_arrival,
            scheduled_wake: first_arrival + p.d - p.beta,
            observed: 0,
        }
    }

    /// Folds a new arrival into the scheduled wake-up.
    ///
    /// The arrival must come strictly before the current scheduled wake-up;
    /// later arrivals find the system already ON.
    pub fn update(self, new_arrival: i64, p: &SystemParams) -> Result<Self> {
        online_wakeup_update(self, new_arrival, p)
    }
}

pub fn online_wakeup_update(
    state: WakeupState,
    new_arrival: i64,
    p: &SystemParams,
) -> Result<WakeupState> {
    if new_arrival >= state.scheduled_wake {
        return Err(Error::ArrivalAfterWake {
            arrival: new_arrival,
            scheduled: state.scheduled_wake,
        });
    }
    let observed = state.observed + 1;
    let delta = p.beta * observed as i64 - (new_arrival - state.first_arrival);
    let candidate = state.first_arrival + p.d - p.beta - delta.max(0);
    Ok(WakeupState {
        observed,
        scheduled_wake: state.scheduled_wake.min(candidate),
        ..state
    })
}
