//! Brute-force ground truth for tests and acceptance runs.
//!
//! Nothing here calls into [`crate::wakeup`], [`crate::offline`] or
//! [`crate::online`]: AP starts come from an exhaustive downward scan over
//! integer ticks, the optimum from enumerating every consecutive partition
//! of the tasks, and expected on-line gap costs from quadrature of the
//! randomized idle-time density.

use crate::error::{Error, Result};
use crate::model::{
    evaluate_schedule, ActivePeriod, CostBreakdown, Problem, Schedule, SystemParams, COST_TOLERANCE,
};

/// Largest instance [`brute_force_optimal`] accepts.
pub const BRUTE_FORCE_MAX_TASKS: usize = 20;

/// Number of trapezoid intervals used by [`expected_online_gap_cost`].
pub const QUADRATURE_INTERVALS: usize = 20_000;

/// FIFO departures of `k..=last` when service may begin at `start`.
fn fifo_departures(problem: &Problem, k: usize, last: usize, start: i64) -> Vec<i64> {
    let beta = problem.params().beta;
    let mut free_at = start;
    (k..=last)
        .map(|j| {
            free_at = free_at.max(problem.arrival(j)) + beta;
            free_at
        })
        .collect()
}

fn meets_deadlines(problem: &Problem, k: usize, departures: &[i64]) -> bool {
    departures
        .iter()
        .enumerate()
        .all(|(off, &x)| x <= problem.deadline(k + off))
}

/// Largest integer start in `[a_k, d_k - beta]` from which FIFO service of
/// tasks `k..=last` meets all their deadlines.
pub fn latest_feasible_start_grid(problem: &Problem, k: usize, last: usize) -> Result<i64> {
    let p = problem.params();
    let a_k = problem.arrival(k);
    (a_k..=a_k + p.d - p.beta)
        .rev()
        .find(|&s| meets_deadlines(problem, k, &fifo_departures(problem, k, last, s)))
        .ok_or(Error::NoFeasibleStart { task: k })
}

/// All `2^(n-1)` ways to cut tasks `0..n` into consecutive groups.
///
/// Bit `j` of the mask set means a new group begins at task `j + 1`.
#[derive(Debug, Clone)]
pub struct PartitionEnumeration {
    n: usize,
    next: u64,
    end: u64,
}

impl PartitionEnumeration {
    pub fn new(n: usize) -> Self {
        let end = if n == 0 { 0 } else { 1u64 << (n - 1) };
        Self { n, next: 0, end }
    }
}

impl Iterator for PartitionEnumeration {
    /// Inclusive `(first, last)` task ranges.
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut groups = Vec::new();
        let mut first = 0;
        for j in 0..self.n - 1 {
            if mask >> j & 1 == 1 {
                groups.push((first, j));
                first = j + 1;
            }
        }
        groups.push((first, self.n - 1));
        Some(groups)
    }
}

/// Minimum-cost schedule over every consecutive partition of the tasks.
///
/// Each group becomes one AP opened at its latest feasible start and closed
/// at its last departure. Partitions are skipped when a boundary is not a
/// decision point (the previous group's last departure is not strictly before
/// the next group's first arrival) or when evaluation fails. Among equal
/// costs the first partition in mask order wins.
pub fn brute_force_optimal(problem: &Problem) -> Result<(Schedule, CostBreakdown)> {
    let n = problem.len();
    if n > BRUTE_FORCE_MAX_TASKS {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_TASKS,
        });
    }
    if n == 0 {
        return Ok((Schedule::default(), CostBreakdown::default()));
    }

    // (start, end) of the AP serving k..=last, or None when no start works.
    type Span = Option<(i64, i64)>;
    let mut group_ap: Vec<Vec<Option<Span>>> = vec![vec![None; n]; n];
    let mut best: Option<(Schedule, CostBreakdown)> = None;

    'partitions: for groups in PartitionEnumeration::new(n) {
        let mut aps = Vec::with_capacity(groups.len());
        for &(k, last) in &groups {
            let span = *group_ap[k][last].get_or_insert_with(|| {
                latest_feasible_start_grid(problem, k, last).ok().map(|s| {
                    let end = *fifo_departures(problem, k, last, s).last().unwrap();
                    (s, end)
                })
            });
            let Some((start, end)) = span else {
                continue 'partitions;
            };
            if let Some(prev) = aps.last() {
                let prev: &ActivePeriod = prev;
                if prev.end >= problem.arrival(k) || prev.end >= start {
                    continue 'partitions;
                }
            }
            aps.push(ActivePeriod {
                start,
                end,
                first_task: k,
                last_task: last,
            });
        }
        let sched = Schedule::new(aps);
        let Ok(cost) = evaluate_schedule(problem, &sched) else {
            continue;
        };
        let better = best
            .as_ref()
            .is_none_or(|(_, b)| cost.total < b.total - COST_TOLERANCE);
        if better {
            best = Some((sched, cost));
        }
    }
    best.ok_or(Error::NoFeasibleStart { task: 0 })
}

/// Idle-time rule whose expected cost over one inter-task gap is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapPolicy {
    /// Idle for a fixed time, then sleep.
    Deterministic(f64),
    /// Idle for a random time with density `e^(x/tau) / (tau (e - 1))` on `[0, tau]`.
    Randomized,
}

fn idle_density(x: f64, tau: f64) -> f64 {
    if (0.0..=tau).contains(&x) {
        (x / tau).exp() / (tau * (std::f64::consts::E - 1.0))
    } else {
        0.0
    }
}

fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let h = (hi - lo) / intervals as f64;
    let inner: f64 = (1..intervals).map(|i| f(lo + i as f64 * h)).sum();
    h * (0.5 * (f(lo) + f(hi)) + inner)
}

/// Expected on-line cost of a gap of `y` ticks between a departure and the
/// next arrival: idle cost if the arrival beats the sleep timer, otherwise
/// the idle time spent plus one wake-up.
///
/// Requires `c_idle > 0` for the randomized rule.
pub fn expected_online_gap_cost(y: f64, policy: GapPolicy, p: &SystemParams) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    match policy {
        GapPolicy::Deterministic(theta) => {
            if y <= theta {
                p.c_idle * y
            } else {
                p.c_idle * theta + p.c_wake
            }
        }
        GapPolicy::Randomized => {
            assert!(p.c_idle > 0.0, "randomized gap cost needs c_idle > 0");
            let tau = p.c_wake / p.c_idle;
            if tau == 0.0 {
                return p.c_wake;
            }
            let m = y.min(tau);
            let slept = trapezoid(
                |x| (p.c_idle * x + p.c_wake) * idle_density(x, tau),
                0.0,
                m,
                QUADRATURE_INTERVALS,
            );
            let cdf = trapezoid(|x| idle_density(x, tau), 0.0, m, QUADRATURE_INTERVALS);
            slept + p.c_idle * y * (1.0 - cdf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(arrivals: Vec<i64>) -> Problem {
        let p = SystemParams::new(1, 10, 10.0, 1.0, 1.0).unwrap();
        Problem::from_arrivals(p, arrivals).unwrap()
    }

    #[test]
    fn grid_start_examples() {
        assert_eq!(
            latest_feasible_start_grid(&example(vec![0, 19]), 0, 0).unwrap(),
            9
        );
        let p = SystemParams::new(2, 10, 10.0, 1.0, 1.0).unwrap();
        let prob = Problem::from_arrivals(p, vec![0, 1]).unwrap();
        assert_eq!(latest_feasible_start_grid(&prob, 0, 1).unwrap(), 7);
        // Arrival exactly at d_k - beta.
        assert_eq!(
            latest_feasible_start_grid(&example(vec![0, 9]), 0, 1).unwrap(),
            9
        );
    }

    #[test]
    fn partitions_are_exhaustive() {
        assert_eq!(PartitionEnumeration::new(0).count(), 0);
        assert_eq!(
            PartitionEnumeration::new(1).collect::<Vec<_>>(),
            vec![vec![(0, 0)]]
        );
        let all: Vec<_> = PartitionEnumeration::new(4).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], vec![(0, 3)]);
        assert_eq!(all[7], vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn brute_force_worked_examples() {
        let (s, c) = brute_force_optimal(&example(vec![0, 19, 29])).unwrap();
        assert_eq!(c.total, 23.0);
        assert_eq!(s.to_string(), "[[9,10],[28,30]]");

        let (s, c) = brute_force_optimal(&example(vec![0, 19])).unwrap();
        assert_eq!(c.total, 21.0);
        assert_eq!(s.aps.len(), 1);

        let (_, c) = brute_force_optimal(&example(vec![3])).unwrap();
        assert_eq!(c.total, 11.0);
        let (_, c) = brute_force_optimal(&example(vec![0, 25])).unwrap();
        assert_eq!(c.total, 22.0);
    }

    #[test]
    fn brute_force_guard() {
        let arrivals = (0..21).map(|i| i * 3).collect();
        assert!(matches!(
            brute_force_optimal(&example(arrivals)),
            Err(Error::TooLarge { n: 21, .. })
        ));
    }

    #[test]
    fn deterministic_gap_cost() {
        let p = SystemParams::new(1, 10, 10.0, 1.0, 1.0).unwrap();
        let g = GapPolicy::Deterministic(10.0);
        assert_eq!(expected_online_gap_cost(0.0, g, &p), 0.0);
        assert_eq!(expected_online_gap_cost(4.0, g, &p), 4.0);
        assert_eq!(expected_online_gap_cost(10.0, g, &p), 10.0);
        assert_eq!(expected_online_gap_cost(11.0, g, &p), 20.0);
    }

    #[test]
    fn randomized_gap_cost_beyond_threshold() {
        let p = SystemParams::new(1, 10, 10.0, 1.0, 1.0).unwrap();
        let e = std::f64::consts::E;
        let want = e / (e - 1.0) * p.c_wake;
        for y in [10.0, 15.0, 100.0] {
            let got = expected_online_gap_cost(y, GapPolicy::Randomized, &p);
            assert!(
                (got - want).abs() <= 1e-6 * p.c_wake,
                "y={y}: {got} vs {want}"
            );
        }
        assert_eq!(
            expected_online_gap_cost(0.0, GapPolicy::Randomized, &p),
            0.0
        );
    }
}
