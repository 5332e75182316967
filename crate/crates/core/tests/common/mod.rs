#![allow(dead_code)]

use onoff_sched::{Problem, SystemParams};
use proptest::prelude::*;

/// Pushes each arrival back until no window of `d` ticks holds more than
/// `floor(d / beta)` arrivals.
pub fn make_feasible(p: &SystemParams, gaps: &[i64]) -> Vec<i64> {
    let cap = p.capacity();
    let mut a: Vec<i64> = Vec::with_capacity(gaps.len());
    for (j, &g) in gaps.iter().enumerate() {
        let mut t = a.last().map_or(g, |&prev| prev + g);
        if j >= cap {
            t = t.max(a[j - cap] + p.d);
        }
        a.push(t);
    }
    a
}

/// `beta` in {1, 2}, `d` in {5, 10, 20}, `c_idle <= c_busy`.
pub fn params() -> impl Strategy<Value = SystemParams> {
    (
        prop::sample::select(vec![1i64, 2]),
        prop::sample::select(vec![5i64, 10, 20]),
        0u32..=40,
        1u32..=20,
        0.0f64..=1.0,
    )
        .prop_map(|(beta, d, cw, cb, idle_frac)| {
            let c_busy = f64::from(cb) / 4.0;
            SystemParams::new(beta, d, f64::from(cw) / 2.0, c_busy, idle_frac * c_busy).unwrap()
        })
}

/// Same as [`params`] but with `c_wake > 0` and `c_idle > 0`.
pub fn positive_params() -> impl Strategy<Value = SystemParams> {
    params().prop_map(|p| {
        SystemParams::new(p.beta, p.d, p.c_wake.max(0.5), p.c_busy, p.c_idle.max(0.05)).unwrap()
    })
}

pub fn problem_with(
    params: impl Strategy<Value = SystemParams>,
    max_n: usize,
) -> impl Strategy<Value = Problem> {
    (params, prop::collection::vec(0i64..=60, 0..=max_n)).prop_map(|(p, gaps)| {
        let a = make_feasible(&p, &gaps);
        Problem::from_arrivals(p, a).unwrap()
    })
}

pub fn problem(max_n: usize) -> impl Strategy<Value = Problem> {
    problem_with(params(), max_n)
}
