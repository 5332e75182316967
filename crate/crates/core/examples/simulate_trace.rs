//! Runs the naive, break-even and randomized controllers on one generated
//! instance, replays the off-line optimum, and dumps the first few events.

use onoff_sched::sim::{generate_instance, simulate, Controller, GenConfig};
use onoff_sched::{solve_offline, Problem, SleepPolicy, SystemParams};

fn main() -> onoff_sched::Result<()> {
    let p = SystemParams::new(2, 20, 30.0, 1.0, 0.5)?;
    let cfg = GenConfig {
        n_tasks: 200,
        max_gap: 40,
        seed: 3,
    };
    let problem = Problem::new(p, generate_instance(&cfg, &p)?)?;
    let opt = solve_offline(&problem)?;

    let policies = [
        SleepPolicy::Naive,
        SleepPolicy::break_even(&p),
        SleepPolicy::Randomized { seed: 1 },
    ];
    println!(
        "{:<12} {:>9} {:>7} {:>7}",
        "controller", "total", "ratio", "wakes"
    );
    for pol in policies {
        let tr = simulate(&problem, Controller::Online(pol))?;
        assert!(tr.deadline_misses.is_empty());
        println!(
            "{:<12} {:>9.2} {:>7.4} {:>7}",
            pol.to_string(),
            tr.cost.total,
            tr.cost.total / opt.cost.total,
            tr.cost.wakeups
        );
    }
    let replay = simulate(&problem, Controller::Replay(&opt.schedule))?;
    println!(
        "{:<12} {:>9.2} {:>7.4} {:>7}",
        "optimal", replay.cost.total, 1.0, replay.cost.wakeups
    );

    let tr = simulate(&problem, Controller::Online(SleepPolicy::break_even(&p)))?;
    for ev in tr.events.iter().take(8) {
        println!("{}", serde_json::to_string(ev)?);
    }
    Ok(())
}
