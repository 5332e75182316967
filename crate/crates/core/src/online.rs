//! Sleep controllers for the on-line setting.
//!
//! At a decision point (the queue just emptied) a controller picks an idle
//! budget: if a task arrives within it the system keeps serving, otherwise
//! it sleeps when the budget runs out. This is the ski-rental trade-off
//! between paying `c_idle` per tick and paying `c_wake` once.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_params, Error, Result};
use crate::model::SystemParams;

const E: f64 = std::f64::consts::E;

/// `e / (e - 1)`, the best expected-cost ratio of a randomized idle rule.
pub const RANDOMIZED_GAP_RATIO: f64 = E / (E - 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SleepPolicy {
    /// Idle for a fixed `theta` ticks before sleeping.
    Deterministic { theta: f64 },
    /// Idle for a random time drawn from the optimal ski-rental density.
    /// Each decision point draws from its own stream keyed by `(seed, index)`.
    Randomized { seed: u64 },
    /// Sleep as soon as the queue empties and wake as soon as a task arrives.
    Naive,
}

impl SleepPolicy {
    /// Deterministic policy with `theta = c_wake / c_idle`.
    pub fn break_even(p: &SystemParams) -> Self {
        SleepPolicy::Deterministic {
            theta: p.sleep_threshold(),
        }
    }

    /// Idle budget in ticks for the `decision_index`-th decision point.
    pub fn idle_budget(&self, p: &SystemParams, decision_index: u64) -> f64 {
        decide_idle_budget(self, p, decision_index)
    }

    /// Whether the controller wakes on arrival instead of at the latest
    /// feasible start.
    pub fn wakes_on_arrival(&self) -> bool {
        matches!(self, SleepPolicy::Naive)
    }
}

pub fn decide_idle_budget(policy: &SleepPolicy, p: &SystemParams, decision_index: u64) -> f64 {
    match *policy {
        SleepPolicy::Deterministic { theta } => theta,
        SleepPolicy::Naive => 0.0,
        SleepPolicy::Randomized { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(decision_index);
            sample_theta(rng.gen::<f64>(), p)
        }
    }
}

/// Inverse CDF of the randomized idle time: `tau * ln(1 + u (e - 1))`
/// with `tau = c_wake / c_idle`.
pub fn sample_theta(u: f64, p: &SystemParams) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    p.sleep_threshold() * (1.0 + u.min(1.0) * (E - 1.0)).ln()
}

impl fmt::Display for SleepPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SleepPolicy::Deterministic { theta } => write!(f, "det:{theta}"),
            SleepPolicy::Randomized { seed } => write!(f, "rand:{seed}"),
            SleepPolicy::Naive => write!(f, "naive"),
        }
    }
}

/// Parses `naive`, `det:<theta>` or `rand:<seed>`.
impl FromStr for SleepPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig {
            reason: format!("unknown policy {s:?}; expected naive, det:<theta> or rand:<seed>"),
        };
        match s.split_once(':') {
            None if s == "naive" => Ok(SleepPolicy::Naive),
            Some(("det", v)) => {
                let theta: f64 = v.parse().map_err(|_| bad())?;
                if theta.is_nan() || theta < 0.0 {
                    return Err(bad());
                }
                Ok(SleepPolicy::Deterministic { theta })
            }
            Some(("rand", v)) => Ok(SleepPolicy::Randomized {
                seed: v.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// `gamma = c_busy * beta / c_wake` and `tau = c_wake / c_idle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompetitiveParams {
    pub gamma: f64,
    pub tau: f64,
}

impl CompetitiveParams {
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        if p.c_wake <= 0.0 || p.c_idle <= 0.0 {
            return Err(invalid_params(
                "competitive analysis needs c_wake > 0 and c_idle > 0",
            ));
        }
        Ok(Self {
            gamma: p.service_cost() / p.c_wake,
            tau: p.c_wake / p.c_idle,
        })
    }
}

/// Worst-case on-line / off-line cost ratio over `n` tasks, each in its
/// own AP with every gap longer than both the idle budget and `tau`.
///
/// Deterministic: `(C_W + n b + (n-1)(C_I theta + C_W)) /
/// (C_W + n b + (n-1) min(C_I theta, C_W))` with `b = C_B beta`.
/// Randomized: the same shape with the per-gap on-line cost replaced by its
/// expectation `e/(e-1) C_W` and the off-line gap cost by `C_W`.
/// Naive is evaluated as the deterministic rule with `theta = 0`.
pub fn competitive_ratio_bound(policy: &SleepPolicy, p: &SystemParams, n: usize) -> f64 {
    let n_f = n as f64;
    let gaps = n.saturating_sub(1) as f64;
    let base = p.c_wake + n_f * p.service_cost();
    let (online_gap, offline_gap) = match *policy {
        SleepPolicy::Deterministic { theta } => (
            p.c_idle * theta + p.c_wake,
            (p.c_idle * theta).min(p.c_wake),
        ),
        SleepPolicy::Naive => (p.c_wake, 0.0),
        SleepPolicy::Randomized { .. } => (RANDOMIZED_GAP_RATIO * p.c_wake, p.c_wake),
    };
    (base + gaps * online_gap) / (base + gaps * offline_gap)
}

/// Limit of the deterministic bound as `n → ∞` for idle budget `theta`.
pub fn deterministic_ratio_limit(p: &SystemParams, theta: f64) -> f64 {
    let b = p.service_cost();
    (b + p.c_idle * theta + p.c_wake) / (b + (p.c_idle * theta).min(p.c_wake))
}

/// `(2 + gamma) / (1 + gamma)`: the best deterministic limit, reached at
/// `theta = tau`.
pub fn best_deterministic_limit(gamma: f64) -> f64 {
    (2.0 + gamma) / (1.0 + gamma)
}

/// `(gamma + e/(e-1)) / (gamma + 1)`: the limit of the randomized controller.
pub fn randomized_ratio_limit(gamma: f64) -> f64 {
    if gamma.is_infinite() {
        return 1.0;
    }
    (gamma + RANDOMIZED_GAP_RATIO) / (gamma + 1.0)
}
