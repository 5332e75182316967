//! Idle budgets drawn by inverse-transform sampling, their histogram, and
//! the expected gap cost that makes the adversary's choice of gap irrelevant.

use onoff_sched::online::{sample_theta, SleepPolicy, RANDOMIZED_GAP_RATIO};
use onoff_sched::oracle::{expected_online_gap_cost, GapPolicy};
use onoff_sched::SystemParams;

fn main() -> onoff_sched::Result<()> {
    let p = SystemParams::new(1, 10, 10.0, 1.0, 1.0)?;
    let tau = p.sleep_threshold();
    println!("tau = {tau}, median budget = {:.4}", sample_theta(0.5, &p));

    let pol = SleepPolicy::Randomized { seed: 99 };
    let mut bins = [0usize; 10];
    let n = 50_000;
    for i in 0..n {
        let x = pol.idle_budget(&p, i);
        bins[((x / tau * 10.0) as usize).min(9)] += 1;
    }
    for (b, count) in bins.iter().enumerate() {
        let bar = "#".repeat(count * 400 / n as usize);
        println!("[{:>4.1},{:>4.1}) {bar}", b as f64, b as f64 + 1.0);
    }

    println!("gap y   E[cost]   / min(C_I y, C_W)   (target {RANDOMIZED_GAP_RATIO:.5})");
    for y in [1.0, 5.0, 10.0, 20.0] {
        let c = expected_online_gap_cost(y, GapPolicy::Randomized, &p);
        println!(
            "{y:>5}   {c:>7.4}   {:.5}",
            c / (p.c_idle * y).min(p.c_wake)
        );
    }
    Ok(())
}
