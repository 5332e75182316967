use std::path::Path;
use std::process::{Command, Output};

fn onoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onoff"))
        .args(args)
        .env("ONOFF_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_instance(dir: &Path, name: &str, arrivals: &str) -> String {
    let path = dir.join(name);
    std::fs::write(
        &path,
        format!(
            r#"{{"params":{{"beta":1,"d":10,"c_wake":10.0,"c_busy":1.0,"c_idle":1.0}},"arrivals":{arrivals}}}"#
        ),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_writes_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "s2.json", "[0,19,29]");
    let out = dir.path().join("sched.json");
    let o = onoff(&["solve", &inst, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(r#""total":23.0"#));
    let sched: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let aps = sched["aps"].as_array().unwrap();
    assert_eq!(aps.len(), 2);
    assert_eq!(
        (aps[0]["start"].as_i64(), aps[0]["end"].as_i64()),
        (Some(9), Some(10))
    );
    assert_eq!(
        (aps[1]["start"].as_i64(), aps[1]["end"].as_i64()),
        (Some(28), Some(30))
    );
    assert_eq!(aps[1]["first_task"].as_i64(), Some(2));
}

#[test]
fn solve_verbose_dumps_tables() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "s2.json", "[0,19,29]");
    let o = onoff(&["solve", &inst, "--verbose"]);
    assert!(o.status.success());
    let tables: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(tables[0].as_array().unwrap().len(), 6);
}

#[test]
fn solve_empty_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "empty.json", "[]");
    let o = onoff(&["solve", &inst]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains(r#"{"aps":[]}"#), "{text}");
    assert!(text.contains(r#""total":0.0"#));
}

#[test]
fn infeasible_instance_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        r#"{"params":{"beta":5,"d":10,"c_wake":1.0,"c_busy":1.0,"c_idle":1.0},"arrivals":[0,1,2]}"#,
    )
    .unwrap();
    let o = onoff(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("[0, 10)"), "{err}");
}

#[test]
fn parse_and_io_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.json");
    std::fs::write(&p, "{not json").unwrap();
    assert_eq!(
        onoff(&["solve", p.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        onoff(&["solve", "/nonexistent/x.json"]).status.code(),
        Some(1)
    );
    let inst = write_instance(dir.path(), "desc.json", "[5,1]");
    assert_eq!(onoff(&["solve", &inst]).status.code(), Some(1));
}

#[test]
fn simulate_summary_rows() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "s1.json", "[0,19]");
    let o = onoff(&["simulate", &inst, "--policy", "naive"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "naive");
    assert_eq!(row[1], "22");
    let ratio: f64 = row[2].parse().unwrap();
    assert!((ratio - 22.0 / 21.0).abs() < 1e-12);

    let trace = dir.path().join("trace.json");
    let o = onoff(&[
        "simulate",
        &inst,
        "--policy",
        "det:10",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(stdout(&o).ends_with("det:10,21,1\n"), "{}", stdout(&o));
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(t["cost"]["total"].as_f64(), Some(21.0));
    assert!(t["deadline_misses"].as_array().unwrap().is_empty());
}

#[test]
fn simulate_randomized_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path(), "s2.json", "[0,19,29,60,75,140]");
    let a = stdout(&onoff(&["simulate", &inst, "--policy", "rand:42"]));
    let b = stdout(&onoff(&["simulate", &inst, "--policy", "rand:42"]));
    assert_eq!(a, b);
    assert!(!onoff(&["simulate", &inst, "--policy", "greedy"])
        .status
        .success());
}

#[test]
fn sweep_csv_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = onoff(&[
            "sweep-fig6",
            "--gaps",
            "1..5",
            "--n",
            "200",
            "--cw",
            "0,28",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 11);
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[2] <= f[3] + 1e-9);
        if f[1] == 0.0 {
            assert_eq!(f[4], 1.0);
        }
    }
}

#[test]
fn compete_rows() {
    let o = onoff(&["compete", "--policy", "det", "--n", "1,1000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,gamma,empirical_ratio,theoretical_limit,deadline_misses")
    );
    let one: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(one[2], "1.0");
    let big: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((big[2] - 20990.0 / 11000.0).abs() < 1e-9);

    let o = onoff(&["compete", "--policy", "rand", "--n", "1", "--trials", "3"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("1,0.1,1.0,"));
}
