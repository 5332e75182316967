//! Exact off-line optimum.
//!
//! Two tasks whose deadline and next arrival are more than `c_wake / c_idle`
//! apart are always separated by a sleep on the optimal path, so the instance
//! first splits into independent super active periods (SAPs). Inside a SAP
//! the optimum comes from a backward dynamic program over two states per
//! task: *starting* (the task opens an AP at its latest feasible start) and
//! *following* (the system is already ON when the task arrives and serves it
//! immediately).
//!
//! From either state the system serves tasks back to back until the first
//! task `l` that has not yet arrived when its predecessor departs. That
//! departure is a decision point: sleep (task `l` becomes starting) or idle
//! until `a_l` (task `l` becomes following). Back-pointers record the winning
//! branch and [`traceback`] replays them into a [`Schedule`].

use serde::Serialize;

use crate::error::Result;
use crate::model::{
    evaluate_schedule, ActivePeriod, CostBreakdown, Problem, Schedule, COST_TOLERANCE,
};
use crate::wakeup::optimal_ap_start;

/// Consecutive tasks `first..=last` forming one super active period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SapRange {
    pub first: usize,
    pub last: usize,
}

/// Splits the instance wherever `d_j + c_wake / c_idle < a_{j+1}`.
pub fn decompose_saps(problem: &Problem) -> Vec<SapRange> {
    let a = problem.arrivals();
    if a.is_empty() {
        return Vec::new();
    }
    let threshold = problem.params().sleep_threshold();
    let mut saps = Vec::new();
    let mut first = 0;
    for j in 0..a.len() - 1 {
        if (problem.deadline(j) as f64) + threshold < a[j + 1] as f64 {
            saps.push(SapRange { first, last: j });
            first = j + 1;
        }
    }
    saps.push(SapRange {
        first,
        last: a.len() - 1,
    });
    saps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    #[serde(rename = "S")]
    Starting,
    #[serde(rename = "F")]
    Following,
}

impl NodeKind {
    fn slot(self) -> usize {
        match self {
            NodeKind::Starting => 0,
            NodeKind::Following => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeRef {
    pub task: usize,
    pub kind: NodeKind,
}

/// Optimal cost of serving `task..=last` of the SAP given the task's state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpNode {
    pub task: usize,
    pub kind: NodeKind,
    pub value: f64,
    /// When this task begins service: its latest feasible AP start for a
    /// starting task, its arrival for a following task.
    pub anchor: i64,
    pub next: Option<NodeRef>,
}

/// Solved DP table of one SAP.
#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub sap: SapRange,
    nodes: Vec<[DpNode; 2]>,
}

impl DpSolution {
    pub fn node(&self, task: usize, kind: NodeKind) -> &DpNode {
        &self.nodes[task - self.sap.first][kind.slot()]
    }

    /// The starting state of the SAP's first task; its value is the SAP optimum.
    pub fn root(&self) -> &DpNode {
        self.node(self.sap.first, NodeKind::Starting)
    }

    /// Per-task values and back-pointers with 1-based task indices.
    pub fn trace(&self) -> Vec<DpTraceRow> {
        self.nodes
            .iter()
            .flat_map(|pair| pair.iter())
            .map(|n| DpTraceRow {
                task: n.task + 1,
                kind: n.kind,
                value: n.value,
                anchor: n.anchor,
                next_task: n.next.map(|r| r.task + 1),
                next_kind: n.next.map(|r| r.kind),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DpTraceRow {
    pub task: usize,
    pub kind: NodeKind,
    pub value: f64,
    pub anchor: i64,
    pub next_task: Option<usize>,
    pub next_kind: Option<NodeKind>,
}

/// First task after `from` that has not arrived when its predecessor departs,
/// with service running back to back from `anchor`.
fn first_gap(problem: &Problem, from: usize, last: usize, anchor: i64) -> Option<usize> {
    let beta = problem.params().beta;
    (from + 1..=last).find(|&j| anchor + (j - from) as i64 * beta < problem.arrival(j))
}

/// Backward DP over `sap.last` down to `sap.first`.
pub fn solve_sap(problem: &Problem, sap: SapRange) -> DpSolution {
    let p = problem.params();
    let (k, n) = (sap.first, sap.last);
    let serve = |count: usize| count as f64 * p.service_cost();

    let placeholder = DpNode {
        task: 0,
        kind: NodeKind::Starting,
        value: 0.0,
        anchor: 0,
        next: None,
    };
    let mut nodes = vec![[placeholder; 2]; n - k + 1];
    let at = |task: usize| task - k;

    nodes[at(n)] = [
        DpNode {
            task: n,
            kind: NodeKind::Starting,
            value: p.c_wake + serve(1),
            anchor: optimal_ap_start(problem, n),
            next: None,
        },
        DpNode {
            task: n,
            kind: NodeKind::Following,
            value: serve(1),
            anchor: problem.arrival(n),
            next: None,
        },
    ];

    for task in (k..n).rev() {
        let mut pair = [placeholder; 2];
        for kind in [NodeKind::Starting, NodeKind::Following] {
            let (anchor, wake) = match kind {
                NodeKind::Starting => (optimal_ap_start(problem, task), p.c_wake),
                NodeKind::Following => (problem.arrival(task), 0.0),
            };
            let node = match first_gap(problem, task, n, anchor) {
                None => DpNode {
                    task,
                    kind,
                    value: wake + serve(n - task + 1),
                    anchor,
                    next: None,
                },
                Some(l) => {
                    let served = l - task;
                    let to_sleep = wake + serve(served);
                    let idle_ticks = problem.arrival(l) - anchor - served as i64 * p.beta;
                    assert!(idle_ticks > 0, "decision point without a gap");
                    let to_idle = to_sleep + idle_ticks as f64 * p.c_idle;
                    let via_start = to_sleep + nodes[at(l)][0].value;
                    let via_follow = to_idle + nodes[at(l)][1].value;
                    // Ties go to sleeping.
                    let (value, next_kind) = if via_start <= via_follow + COST_TOLERANCE {
                        (via_start, NodeKind::Starting)
                    } else {
                        (via_follow, NodeKind::Following)
                    };
                    DpNode {
                        task,
                        kind,
                        value,
                        anchor,
                        next: Some(NodeRef {
                            task: l,
                            kind: next_kind,
                        }),
                    }
                }
            };
            pair[kind.slot()] = node;
        }
        nodes[at(task)] = pair;
    }

    DpSolution { sap, nodes }
}

/// Replays the back-pointer chain from the root into active periods.
///
/// A starting node opens an AP at its anchor; the AP closes right after the
/// task preceding the next starting node departs. The final AP closes at the
/// last departure.
pub fn traceback(problem: &Problem, sol: &DpSolution) -> Schedule {
    let beta = problem.params().beta;
    let last = sol.sap.last;
    let mut aps = Vec::new();
    let mut cur = sol.root();
    let mut open = (cur.anchor, cur.task);
    loop {
        match cur.next {
            None => {
                aps.push(ActivePeriod {
                    start: open.0,
                    end: cur.anchor + (last - cur.task + 1) as i64 * beta,
                    first_task: open.1,
                    last_task: last,
                });
                break;
            }
            Some(next) => {
                let nxt = sol.node(next.task, next.kind);
                if next.kind == NodeKind::Starting {
                    aps.push(ActivePeriod {
                        start: open.0,
                        end: cur.anchor + (next.task - cur.task) as i64 * beta,
                        first_task: open.1,
                        last_task: next.task - 1,
                    });
                    open = (nxt.anchor, nxt.task);
                }
                cur = nxt;
            }
        }
    }
    Schedule::new(aps)
}

/// Optimal schedule of a whole instance together with its per-SAP tables.
#[derive(Debug, Clone)]
pub struct OfflineSolution {
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    pub saps: Vec<DpSolution>,
}

impl OfflineSolution {
    /// Sum of the per-SAP optimal values.
    pub fn dp_total(&self) -> f64 {
        self.saps.iter().map(|s| s.root().value).sum()
    }
}

/// Decomposes into SAPs, solves each and concatenates the tracebacks.
pub fn solve_offline(problem: &Problem) -> Result<OfflineSolution> {
    let saps: Vec<DpSolution> = decompose_saps(problem)
        .into_iter()
        .map(|sap| solve_sap(problem, sap))
        .collect();
    let aps = saps
        .iter()
        .flat_map(|sol| traceback(problem, sol).aps)
        .collect();
    let schedule = Schedule::new(aps);
    let cost = evaluate_schedule(problem, &schedule)?;
    Ok(OfflineSolution {
        schedule,
        cost,
        saps,
    })
}
