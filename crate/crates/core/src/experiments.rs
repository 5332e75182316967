//! Batch experiments: the optimal-vs-naive gap sweep and the adversarial
//! competitive-ratio runs. Rows are computed in parallel and written as CSV.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Problem, SystemParams};
use crate::offline::solve_offline;
use crate::online::{
    best_deterministic_limit, randomized_ratio_limit, CompetitiveParams, SleepPolicy,
};
use crate::sim::{adversarial_instance, generate_instance, simulate_policy, GenConfig};

/// Environment variable capping the worker threads of a sweep.
pub const THREADS_ENV: &str = "ONOFF_THREADS";

/// Runs `f` on a rayon pool sized by [`THREADS_ENV`] (all cores if unset).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::InvalidConfig {
            reason: format!("{THREADS_ENV}={v:?} is not a thread count"),
        })?;
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig {
        reason: e.to_string(),
    })?;
    Ok(pool.install(f))
}

/// Seed of row `index` under base seed `base`.
pub fn row_seed(base: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Physical parameters of the gap sweep. Powers are in mW, times in ms and
/// wake-up energies in mW*ms (= uJ); `tick_ms` sets the simulation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig6Config {
    pub max_gaps_ms: Vec<f64>,
    pub n_tasks: usize,
    pub c_wake_uj: Vec<f64>,
    pub tick_ms: f64,
    pub seed: u64,
    pub beta_ms: f64,
    pub d_ms: f64,
    pub c_busy_mw: f64,
    pub c_idle_mw: f64,
}

impl Default for Fig6Config {
    fn default() -> Self {
        Self {
            max_gaps_ms: (1..=100).map(f64::from).collect(),
            n_tasks: 1000,
            c_wake_uj: vec![1.0, 7.0, 14.0, 28.0],
            tick_ms: 0.1,
            seed: 2024,
            beta_ms: 1.0,
            d_ms: 20.0,
            c_busy_mw: 30.0,
            c_idle_mw: 0.1,
        }
    }
}

impl Fig6Config {
    fn ticks(&self, ms: f64) -> Result<i64> {
        let t = ms / self.tick_ms;
        if !(t.is_finite() && t >= 0.5) || (t - t.round()).abs() > 1e-6 {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "{ms} ms is not a positive whole number of {} ms ticks",
                    self.tick_ms
                ),
            });
        }
        Ok(t.round() as i64)
    }

    /// Tick-grid parameters for wake-up energy `c_wake_uj`. Costs come out
    /// in uJ: per-tick powers are multiplied by the tick length.
    pub fn params(&self, c_wake_uj: f64) -> Result<SystemParams> {
        if self.tick_ms.is_nan() || self.tick_ms <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: format!("tick_ms = {} must be positive", self.tick_ms),
            });
        }
        SystemParams::new(
            self.ticks(self.beta_ms)?,
            self.ticks(self.d_ms)?,
            c_wake_uj,
            self.c_busy_mw * self.tick_ms,
            self.c_idle_mw * self.tick_ms,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.max_gaps_ms.is_empty() || self.c_wake_uj.is_empty() {
            return Err(Error::InvalidConfig {
                reason: "gap and wake-up energy lists must be non-empty".into(),
            });
        }
        for &g in &self.max_gaps_ms {
            self.ticks(g)?;
        }
        for &cw in &self.c_wake_uj {
            self.params(cw)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig6Row {
    pub max_gap_ms: f64,
    #[serde(rename = "c_wake_uJ")]
    pub c_wake_uj: f64,
    #[serde(rename = "optimal_cost_uJ")]
    pub optimal_cost_uj: f64,
    #[serde(rename = "naive_cost_uJ")]
    pub naive_cost_uj: f64,
    /// `optimal / naive`, 1 when both are zero.
    pub ratio: f64,
    pub deadline_misses: usize,
}

/// For each maximum gap draws one instance (shared by every wake-up energy)
/// and compares the off-line optimum against the naive controller.
///
/// Rows are ordered by gap, then by wake-up energy.
pub fn sweep_fig6(cfg: &Fig6Config) -> Result<Vec<Fig6Row>> {
    cfg.validate()?;
    let per_gap = with_pool(|| {
        cfg.max_gaps_ms
            .par_iter()
            .enumerate()
            .map(|(i, &gap_ms)| fig6_gap_rows(cfg, i, gap_ms))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(per_gap.into_iter().flatten().collect())
}

fn fig6_gap_rows(cfg: &Fig6Config, index: usize, gap_ms: f64) -> Result<Vec<Fig6Row>> {
    let base = cfg.params(cfg.c_wake_uj[0])?;
    let gen = GenConfig {
        n_tasks: cfg.n_tasks,
        max_gap: cfg.ticks(gap_ms)?,
        seed: row_seed(cfg.seed, index as u64),
    };
    let instance = generate_instance(&gen, &base)?;
    cfg.c_wake_uj
        .iter()
        .map(|&cw| {
            let problem = Problem::new(cfg.params(cw)?, instance.clone())?;
            let optimal = solve_offline(&problem)?.cost.total;
            let naive = simulate_policy(&problem, SleepPolicy::Naive)?;
            let ratio = if naive.cost.total > 0.0 {
                optimal / naive.cost.total
            } else {
                1.0
            };
            Ok(Fig6Row {
                max_gap_ms: gap_ms,
                c_wake_uj: cw,
                optimal_cost_uj: optimal,
                naive_cost_uj: naive.cost.total,
                ratio,
                deadline_misses: naive.deadline_misses.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompetePolicy {
    /// Deterministic break-even idle budget `theta = tau`.
    Det,
    /// Randomized idle budget, averaged over trials.
    Rand,
}

impl std::str::FromStr for CompetePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(CompetePolicy::Det),
            "rand" => Ok(CompetePolicy::Rand),
            _ => Err(Error::InvalidConfig {
                reason: format!("unknown policy {s:?}; expected det or rand"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompeteConfig {
    pub policy: CompetePolicy,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub params: SystemParams,
    /// Spacing of the adversarial arrivals; defaults to [`adversarial_gap`].
    pub gap: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompeteRow {
    pub n: usize,
    pub gamma: f64,
    pub empirical_ratio: f64,
    pub theoretical_limit: f64,
    pub deadline_misses: usize,
}

/// Smallest integer spacing whose gaps exceed both `d + tau` and any idle
/// budget up to `tau`.
pub fn adversarial_gap(p: &SystemParams) -> i64 {
    p.d + p.sleep_threshold().floor() as i64 + 1
}

/// Runs the chosen controller on evenly spaced arrivals and reports the
/// on-line / off-line cost ratio next to its `n → ∞` limit.
pub fn compete(cfg: &CompeteConfig) -> Result<Vec<CompeteRow>> {
    let cp = CompetitiveParams::from_params(&cfg.params)?;
    if cfg.ns.is_empty() || (cfg.policy == CompetePolicy::Rand && cfg.trials == 0) {
        return Err(Error::InvalidConfig {
            reason: "need at least one n and, for rand, at least one trial".into(),
        });
    }
    let gap = cfg.gap.unwrap_or_else(|| adversarial_gap(&cfg.params));
    cfg.ns
        .iter()
        .enumerate()
        .map(|(row, &n)| {
            let problem = Problem::new(cfg.params, adversarial_instance(n, gap))?;
            let offline = solve_offline(&problem)?.cost.total;
            let (online, misses, limit) = match cfg.policy {
                CompetePolicy::Det => {
                    let tr =
                        simulate_policy(&problem, SleepPolicy::Deterministic { theta: cp.tau })?;
                    (
                        tr.cost.total,
                        tr.deadline_misses.len(),
                        best_deterministic_limit(cp.gamma),
                    )
                }
                CompetePolicy::Rand => {
                    let runs = with_pool(|| {
                        (0..cfg.trials as u64)
                            .into_par_iter()
                            .map(|t| {
                                let seed = row_seed(row_seed(cfg.seed, row as u64), t);
                                simulate_policy(&problem, SleepPolicy::Randomized { seed })
                                    .map(|tr| (tr.cost.total, tr.deadline_misses.len()))
                            })
                            .collect::<Result<Vec<_>>>()
                    })??;
                    let mean = runs.iter().map(|r| r.0).sum::<f64>() / runs.len() as f64;
                    let misses = runs.iter().map(|r| r.1).sum();
                    (mean, misses, randomized_ratio_limit(cp.gamma))
                }
            };
            let empirical_ratio = if offline > 0.0 { online / offline } else { 1.0 };
            Ok(CompeteRow {
                n,
                gamma: cp.gamma,
                empirical_ratio,
                theoretical_limit: limit,
                deadline_misses: misses,
            })
        })
        .collect()
}

/// Writes rows as CSV with a header line.
pub fn write_csv<R: Serialize>(out: impl Write, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_sweep() -> Fig6Config {
        Fig6Config {
            max_gaps_ms: vec![1.0, 30.0],
            n_tasks: 50,
            c_wake_uj: vec![0.0, 28.0],
            ..Fig6Config::default()
        }
    }

    #[test]
    fn unit_conversion() {
        let p = Fig6Config::default().params(28.0).unwrap();
        assert_eq!((p.beta, p.d), (10, 200));
        assert!((p.c_busy - 3.0).abs() < 1e-12);
        assert!((p.c_idle - 0.01).abs() < 1e-12);
        assert_eq!(p.c_wake, 28.0);
    }

    #[test]
    fn rejects_off_grid_times() {
        let cfg = Fig6Config {
            max_gaps_ms: vec![0.05],
            ..small_sweep()
        };
        assert!(sweep_fig6(&cfg).is_err());
        assert!(sweep_fig6(&Fig6Config {
            c_wake_uj: vec![],
            ..small_sweep()
        })
        .is_err());
    }

    #[test]
    fn sweep_rows_and_free_wakeups() {
        let rows = sweep_fig6(&small_sweep()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.optimal_cost_uj <= r.naive_cost_uj + 1e-9);
            assert_eq!(r.deadline_misses, 0);
        }
        assert!((rows[0].ratio - 1.0).abs() < 1e-9);
        assert!((rows[2].ratio - 1.0).abs() < 1e-9);
        assert!(rows[3].ratio < 1.0);
    }

    #[test]
    fn sweep_is_reproducible() {
        let a = sweep_fig6(&small_sweep()).unwrap();
        let b = sweep_fig6(&small_sweep()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_header_uses_unit_suffixes() {
        let rows = sweep_fig6(&small_sweep()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "max_gap_ms,c_wake_uJ,optimal_cost_uJ,naive_cost_uJ,ratio,deadline_misses\n"
        ));
        assert_eq!(text.lines().count(), 5);
    }

    fn compete_cfg(policy: CompetePolicy, ns: Vec<usize>) -> CompeteConfig {
        CompeteConfig {
            policy,
            ns,
            trials: 4,
            seed: 1,
            params: SystemParams::new(1, 10, 10.0, 1.0, 1.0).unwrap(),
            gap: None,
        }
    }

    #[test]
    fn deterministic_compete() {
        let rows = compete(&compete_cfg(CompetePolicy::Det, vec![1, 1000])).unwrap();
        assert_eq!(rows[0].empirical_ratio, 1.0);
        assert!((rows[1].empirical_ratio - 20990.0 / 11000.0).abs() < 1e-9);
        assert!((rows[1].theoretical_limit - 21.0 / 11.0).abs() < 1e-12);
        assert_eq!(rows[1].deadline_misses, 0);
    }

    #[test]
    fn randomized_compete_single_task() {
        let rows = compete(&compete_cfg(CompetePolicy::Rand, vec![1])).unwrap();
        assert_eq!(rows[0].empirical_ratio, 1.0);
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(row_seed(0, 0), row_seed(0, 1));
        assert_ne!(row_seed(0, 1), row_seed(1, 0));
    }
}
