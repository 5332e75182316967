//! Empirical vs theoretical competitive ratios on evenly spaced arrivals,
//! where every task ends up in its own AP.

use onoff_sched::experiments::{compete, write_csv, CompeteConfig, CompetePolicy};
use onoff_sched::online::{best_deterministic_limit, randomized_ratio_limit};
use onoff_sched::SystemParams;

fn main() -> onoff_sched::Result<()> {
    // gamma = C_B beta / C_W = 0.1
    let params = SystemParams::new(1, 10, 10.0, 1.0, 1.0)?;
    for policy in [CompetePolicy::Det, CompetePolicy::Rand] {
        let rows = compete(&CompeteConfig {
            policy,
            ns: vec![1, 10, 100, 1000],
            trials: 50,
            seed: 5,
            params,
            gap: None,
        })?;
        println!("{policy:?}");
        write_csv(std::io::stdout().lock(), &rows)?;
    }

    println!("gamma  det-limit  rand-limit");
    for gamma in [0.0, 0.1, 0.5, 1.0, 5.0] {
        println!(
            "{gamma:<5}  {:.4}     {:.4}",
            best_deterministic_limit(gamma),
            randomized_ratio_limit(gamma)
        );
    }
    Ok(())
}
