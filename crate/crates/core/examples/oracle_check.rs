//! Cross-checks the DP against exhaustive search on random small instances.

use onoff_sched::oracle::brute_force_optimal;
use onoff_sched::sim::{generate_instance, GenConfig};
use onoff_sched::{solve_offline, Problem, SystemParams, COST_TOLERANCE};

fn main() -> onoff_sched::Result<()> {
    let p = SystemParams::new(2, 10, 8.0, 1.0, 0.6)?;
    let mut worst: f64 = 0.0;
    for seed in 0..300 {
        let cfg = GenConfig {
            n_tasks: 12,
            max_gap: 15,
            seed,
        };
        let problem = Problem::new(p, generate_instance(&cfg, &p)?)?;
        let dp = solve_offline(&problem)?;
        let (bf_sched, bf) = brute_force_optimal(&problem)?;
        worst = worst.max((dp.cost.total - bf.total).abs());
        if seed < 3 {
            println!(
                "seed {seed}: dp {} = {}, brute force {} = {}",
                dp.schedule, dp.cost.total, bf_sched, bf.total
            );
        }
    }
    println!("300 instances, max difference {worst:e}");
    assert!(worst <= COST_TOLERANCE);
    Ok(())
}
