//! Optimal vs naive energy over maximum inter-arrival gaps of 1..100 ms.
//!
//! Prints the CSV to stdout and a one-line summary per wake-up energy to
//! stderr. Try `ONOFF_THREADS=4 cargo run --release --example fig6_sweep`.

use onoff_sched::experiments::{sweep_fig6, write_csv, Fig6Config};

fn main() -> onoff_sched::Result<()> {
    let cfg = Fig6Config::default();
    let rows = sweep_fig6(&cfg)?;
    write_csv(std::io::stdout().lock(), &rows)?;

    for &cw in &cfg.c_wake_uj {
        let best = rows
            .iter()
            .filter(|r| r.c_wake_uj == cw)
            .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .expect("non-empty sweep");
        eprintln!(
            "c_wake = {cw:>4} uJ: lowest optimal/naive ratio {:.3} at max gap {} ms",
            best.ratio, best.max_gap_ms
        );
    }
    Ok(())
}
