//! Solves the two small instances used throughout the docs and prints the
//! DP tables next to the resulting schedules.
//!
//! `cargo run --example offline_walkthrough`

use onoff_sched::offline::{decompose_saps, solve_offline};
use onoff_sched::{evaluate_schedule, Problem, Schedule, SystemParams};

fn main() -> onoff_sched::Result<()> {
    // beta = 1, d = 10, C_W = 10, C_B = C_I = 1.
    let p = SystemParams::new(1, 10, 10.0, 1.0, 1.0)?;

    for arrivals in [vec![0, 19], vec![0, 19, 29]] {
        let problem = Problem::from_arrivals(p, arrivals.clone())?;
        println!("arrivals {arrivals:?}");
        println!("  SAPs: {:?}", decompose_saps(&problem));

        let sol = solve_offline(&problem)?;
        for sap in &sol.saps {
            println!("  task kind   value anchor next");
            for row in sap.trace() {
                let next = match (row.next_task, row.next_kind) {
                    (Some(t), Some(k)) => format!("{t} {k:?}"),
                    _ => "-".into(),
                };
                println!(
                    "  {:>4} {:<9} {:>5} {:>6} {next}",
                    row.task,
                    format!("{:?}", row.kind),
                    row.value,
                    row.anchor
                );
            }
        }
        println!("  optimal schedule {} cost {:?}", sol.schedule, sol.cost);
    }

    // The alternative for the first instance: two single-task APs.
    let problem = Problem::from_arrivals(p, vec![0, 19])?;
    let split: Schedule = serde_json::from_str(
        r#"{"aps":[{"start":9,"end":10,"first_task":1,"last_task":1},
                   {"start":28,"end":29,"first_task":2,"last_task":2}]}"#,
    )?;
    println!(
        "two wake-ups instead: {}",
        evaluate_schedule(&problem, &split)?.total
    );
    Ok(())
}
