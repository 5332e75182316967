//! The latest feasible AP start, computed off-line in closed form and
//! reached on-line by lowering a scheduled wake-up as tasks arrive.

use onoff_sched::wakeup::{optimal_ap_start, WakeupState};
use onoff_sched::{Problem, SystemParams};

fn main() -> onoff_sched::Result<()> {
    let p = SystemParams::new(2, 10, 10.0, 1.0, 1.0)?;
    let arrivals = vec![0, 1, 3, 30];
    let problem = Problem::from_arrivals(p, arrivals.clone())?;

    let mut state = WakeupState::new(0, arrivals[0], &p);
    println!(
        "t={:>2}: task 1 arrives, wake scheduled at {}",
        arrivals[0], state.scheduled_wake
    );
    for (j, &t) in arrivals.iter().enumerate().skip(1) {
        if t >= state.scheduled_wake {
            println!("t={t:>2}: task {} finds the server already on", j + 1);
            break;
        }
        state = state.update(t, &p)?;
        println!(
            "t={t:>2}: task {} arrives, wake moved to {}",
            j + 1,
            state.scheduled_wake
        );
    }
    println!("off-line latest start: {}", optimal_ap_start(&problem, 0));
    Ok(())
}
