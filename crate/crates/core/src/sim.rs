//! Event-driven execution of a controller over an arrival instance.
//!
//! The system starts OFF. Wake-ups come from the on-line latest-start rule
//! (or immediately on arrival for the naive controller, or at the AP starts
//! of a replayed schedule). Whenever the queue empties the controller picks
//! an idle budget; an arrival within the budget is served at once, otherwise
//! the system sleeps when the budget expires. Accounting runs from the first
//! wake-up to the final departure, so idling after the last task is free.
//!
//! Simultaneous events are processed in the order
//! arrival < service done < sleep timer < wake-up.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    compute_departures, ArrivalInstance, CostBreakdown, Problem, Schedule, SystemParams,
};
use crate::online::SleepPolicy;
use crate::wakeup::WakeupState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "task", rename_all = "snake_case")]
pub enum EventKind {
    Arrival(#[serde(serialize_with = "one_based")] usize),
    ServiceDone(#[serde(serialize_with = "one_based")] usize),
    SleepTimerExpired,
    WakeUp,
}

fn one_based<S: serde::Serializer>(task: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*task as u64 + 1)
}

impl EventKind {
    fn rank(self) -> u8 {
        match self {
            EventKind::Arrival(_) => 0,
            EventKind::ServiceDone(_) => 1,
            EventKind::SleepTimerExpired => 2,
            EventKind::WakeUp => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEvent {
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    event: SimEvent,
    seq: u64,
    generation: u64,
}

impl Queued {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.event
            .time
            .total_cmp(&other.event.time)
            .then(self.event.kind.rank().cmp(&other.event.kind.rank()))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// What drives wake-ups and sleeps.
#[derive(Debug, Clone, Copy)]
pub enum Controller<'a> {
    /// On-line: latest-start wake-up (or wake-on-arrival for naive) plus the
    /// policy's idle budget at every decision point.
    Online(SleepPolicy),
    /// Replays a precomputed schedule: wake at each AP start, sleep at its end.
    Replay(&'a Schedule),
}

/// One realized active period. Times are real-valued because sleep timers
/// need not fall on the tick grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApRecord {
    pub wake: f64,
    pub sleep: f64,
    pub first_task: usize,
    pub last_task: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissRecord {
    pub task: usize,
    pub departure: f64,
    pub deadline: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub events: Vec<SimEvent>,
    pub aps: Vec<ApRecord>,
    pub departures: Vec<f64>,
    pub cost: CostBreakdown,
    pub deadline_misses: Vec<MissRecord>,
}

impl SimTrace {
    /// Cost rebuilt from the AP records alone.
    pub fn cost_from_records(&self, p: &SystemParams) -> CostBreakdown {
        let on: f64 = self.aps.iter().map(|ap| ap.sleep - ap.wake).sum();
        let busy = self.departures.len() as i64 * p.beta;
        CostBreakdown::from_parts(p, self.aps.len(), busy, on - busy as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Power {
    Off,
    Busy,
    Idle,
}

struct Engine<'a> {
    problem: &'a Problem,
    controller: Controller<'a>,
    queue: BinaryHeap<Queued>,
    seq: u64,
    power: Power,
    backlog: VecDeque<usize>,
    wake: Option<WakeupState>,
    wake_pending: bool,
    wake_gen: u64,
    sleep_gen: u64,
    idle_since: f64,
    idle_total: f64,
    decisions: u64,
    departed: usize,
    open_ap: Option<(f64, usize)>,
    aps: Vec<ApRecord>,
    events: Vec<SimEvent>,
    departures: Vec<f64>,
    misses: Vec<MissRecord>,
}

impl<'a> Engine<'a> {
    fn push(&mut self, time: f64, kind: EventKind, generation: u64) {
        self.seq += 1;
        self.queue.push(Queued {
            event: SimEvent { time, kind },
            seq: self.seq,
            generation,
        });
    }

    fn start_next(&mut self, t: f64) {
        let j = self.backlog.pop_front().expect("backlog is nonempty");
        self.power = Busy;
        let beta = self.problem.params().beta as f64;
        self.push(t + beta, EventKind::ServiceDone(j), 0);
    }

    fn close_ap(&mut self, t: f64) {
        if let Some((wake, first)) = self.open_ap.take() {
            self.aps.push(ApRecord {
                wake,
                sleep: t,
                first_task: first,
                last_task: self.departed - 1,
            });
        }
    }

    fn replay_ap_end(&self) -> Option<i64> {
        match self.controller {
            Controller::Replay(s) => s.aps.get(self.aps.len()).map(|ap| ap.end),
            Controller::Online(_) => None,
        }
    }

    fn on_arrival(&mut self, j: usize, t: f64) -> Result<()> {
        self.backlog.push_back(j);
        match self.power {
            Busy => {}
            Idle => {
                self.idle_total += t - self.idle_since;
                self.sleep_gen += 1;
                self.start_next(t);
            }
            Off => match self.controller {
                Controller::Replay(_) => {}
                Controller::Online(policy) if policy.wakes_on_arrival() => {
                    if !self.wake_pending {
                        self.wake_pending = true;
                        self.wake_gen += 1;
                        self.push(t, EventKind::WakeUp, self.wake_gen);
                    }
                }
                Controller::Online(_) => {
                    let p = self.problem.params();
                    let a_j = self.problem.arrival(j);
                    match self.wake {
                        None => {
                            let ws = WakeupState::new(j, a_j, p);
                            self.wake = Some(ws);
                            self.wake_gen += 1;
                            self.push(ws.scheduled_wake as f64, EventKind::WakeUp, self.wake_gen);
                        }
                        Some(ws) if a_j < ws.scheduled_wake => {
                            let next = ws.update(a_j, p)?;
                            if next.scheduled_wake < ws.scheduled_wake {
                                self.wake_gen += 1;
                                self.push(
                                    next.scheduled_wake as f64,
                                    EventKind::WakeUp,
                                    self.wake_gen,
                                );
                            }
                            self.wake = Some(next);
                        }
                        // Arrives exactly at the wake-up: joins the backlog.
                        Some(_) => {}
                    }
                }
            },
        }
        Ok(())
    }

    fn on_service_done(&mut self, j: usize, t: f64) -> Result<()> {
        self.departures.push(t);
        self.departed += 1;
        let deadline = self.problem.deadline(j);
        if t > deadline as f64 {
            self.misses.push(MissRecord {
                task: j,
                departure: t,
                deadline,
            });
        }
        if let Some(end) = self.replay_ap_end() {
            if t > end as f64 {
                return Err(Error::ScheduleInfeasible {
                    task: j,
                    reason: format!("departure {t} falls after the AP end {end}"),
                });
            }
        }
        if self.departed == self.problem.len() {
            self.close_ap(t);
            return Ok(());
        }
        if !self.backlog.is_empty() {
            self.start_next(t);
            return Ok(());
        }
        self.enter_idle(t);
        Ok(())
    }

    fn enter_idle(&mut self, t: f64) {
        self.power = Idle;
        self.idle_since = t;
        self.sleep_gen += 1;
        let at = match self.controller {
            Controller::Online(policy) => {
                let budget = policy.idle_budget(self.problem.params(), self.decisions);
                self.decisions += 1;
                t + budget
            }
            Controller::Replay(_) => self.replay_ap_end().map_or(t, |e| e as f64).max(t),
        };
        self.push(at, EventKind::SleepTimerExpired, self.sleep_gen);
    }

    fn on_sleep_timer(&mut self, t: f64) {
        if self.power != Idle {
            return;
        }
        self.idle_total += t - self.idle_since;
        self.power = Off;
        self.close_ap(t);
    }

    fn on_wake(&mut self, t: f64) -> Result<()> {
        if self.power != Off {
            return Err(Error::InvalidSchedule {
                reason: format!("wake-up at {t} while the system is already ON"),
            });
        }
        self.wake = None;
        self.wake_pending = false;
        self.open_ap = Some((t, self.departed));
        if self.backlog.is_empty() {
            self.enter_idle(t);
        } else {
            self.start_next(t);
        }
        Ok(())
    }

    fn run(mut self) -> Result<SimTrace> {
        let n = self.problem.len();
        for j in 0..n {
            self.push(self.problem.arrival(j) as f64, EventKind::Arrival(j), 0);
        }
        if let Controller::Replay(s) = self.controller {
            for ap in &s.aps {
                self.push(ap.start as f64, EventKind::WakeUp, 0);
            }
        }
        while self.departed < n {
            let Some(q) = self.queue.pop() else {
                return Err(Error::InvalidSchedule {
                    reason: format!(
                        "simulation stalled after {} of {n} departures",
                        self.departed
                    ),
                });
            };
            let t = q.event.time;
            match q.event.kind {
                EventKind::SleepTimerExpired if q.generation != self.sleep_gen => continue,
                EventKind::WakeUp if q.generation != self.wake_gen => continue,
                _ => {}
            }
            self.events.push(q.event);
            match q.event.kind {
                EventKind::Arrival(j) => self.on_arrival(j, t)?,
                EventKind::ServiceDone(j) => self.on_service_done(j, t)?,
                EventKind::SleepTimerExpired => self.on_sleep_timer(t),
                EventKind::WakeUp => self.on_wake(t)?,
            }
        }
        let p = self.problem.params();
        let cost = CostBreakdown::from_parts(p, self.aps.len(), n as i64 * p.beta, self.idle_total);
        Ok(SimTrace {
            events: self.events,
            aps: self.aps,
            departures: self.departures,
            cost,
            deadline_misses: self.misses,
        })
    }
}

use Power::{Busy, Idle, Off};

/// Runs `controller` over `problem` and returns the full trace.
///
/// A replayed schedule is checked with [`compute_departures`] first.
pub fn simulate(problem: &Problem, controller: Controller<'_>) -> Result<SimTrace> {
    if let Controller::Replay(s) = controller {
        compute_departures(problem, s)?;
    }
    Engine {
        problem,
        controller,
        queue: BinaryHeap::new(),
        seq: 0,
        power: Off,
        backlog: VecDeque::new(),
        wake: None,
        wake_pending: false,
        wake_gen: 0,
        sleep_gen: 0,
        idle_since: 0.0,
        idle_total: 0.0,
        decisions: 0,
        departed: 0,
        open_ap: None,
        aps: Vec::new(),
        events: Vec::new(),
        departures: Vec::with_capacity(problem.len()),
        misses: Vec::new(),
    }
    .run()
}

/// Shorthand for an on-line run.
pub fn simulate_policy(problem: &Problem, policy: SleepPolicy) -> Result<SimTrace> {
    simulate(problem, Controller::Online(policy))
}

/// Random instance with integer inter-arrival gaps uniform on `[1, max_gap]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_tasks: usize,
    pub max_gap: i64,
    pub seed: u64,
}

/// Draws arrivals starting at 0. A draw that would put more than
/// `floor(d / beta)` arrivals into some window of `d` ticks is pushed back
/// to the earliest admissible tick, so the output is always feasible.
pub fn generate_instance(cfg: &GenConfig, p: &SystemParams) -> Result<ArrivalInstance> {
    if cfg.max_gap < 1 {
        return Err(Error::InvalidConfig {
            reason: format!("max_gap = {} must be >= 1", cfg.max_gap),
        });
    }
    let cap = p.capacity();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut a: Vec<i64> = Vec::with_capacity(cfg.n_tasks);
    for j in 0..cfg.n_tasks {
        let mut t = match a.last() {
            None => 0,
            Some(&prev) => prev + rng.gen_range(1..=cfg.max_gap),
        };
        if j >= cap {
            t = t.max(a[j - cap] + p.d);
        }
        a.push(t);
    }
    ArrivalInstance::new(a)
}

/// Arrivals at `0, gap, 2 gap, ...`.
///
/// With `gap > d + c_wake / c_idle` every task forms its own SAP, and once
/// the on-line gap `gap - d` also exceeds the idle budget the instance is
/// tight for the break-even controller.
pub fn adversarial_instance(n: usize, gap: i64) -> ArrivalInstance {
    ArrivalInstance::new((0..n as i64).map(|i| i * gap).collect()).expect("sorted by construction")
}
