//! End-to-end tests driving the `rmc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn rmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_inst_a(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("inst_a.rmc");
    std::fs::write(
        &path,
        "q 3\ngamma 4\nlocations 2\nregion 0 2\nregion 0 2\nregion 0 2\n\
         edge 0 0\nedge 0 1\nedge 1 1\nedge 1 2\n",
    )
    .unwrap();
    path
}

#[test]
fn solve_reports_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_inst_a(dir.path());
    for formulation in ["setf", "asf"] {
        let out = rmc(&[
            "solve",
            inst.to_str().unwrap(),
            "--formulation",
            formulation,
        ]);
        assert_eq!(out.status.code(), Some(0), "{formulation}");
        let text = stdout(&out);
        assert!(text.contains("objective 2"), "{formulation}: {text}");
        assert!(text.contains("status optimal"));
        assert!(text.contains("cuts "));
        assert!(text.contains("time "));
    }
}

#[test]
fn solve_with_averages_reports_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_inst_a(dir.path());
    let out = rmc(&[
        "solve",
        inst.to_str().unwrap(),
        "--avg-scenarios",
        "4",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("average 2"), "{text}");
    assert!(text.contains("worst 2"), "{text}");
}

#[test]
fn malformed_file_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.rmc");
    std::fs::write(&path, "q 3\ngamma 4\nwat 9\n").unwrap();
    let out = rmc(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn infeasible_instance_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tight.rmc");
    // lower demands exceed the budget
    std::fs::write(
        &path,
        "q 1\ngamma 1\nlocations 1\nregion 1 1\nregion 1 1\nedge 0 0\nedge 0 1\n",
    )
    .unwrap();
    let out = rmc(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_time_limit_exits_two_with_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_inst_a(dir.path());
    let out = rmc(&["solve", inst.to_str().unwrap(), "--time-limit", "0.0"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("status timelimit"), "{text}");
    assert!(text.contains("bounds 2 3"), "{text}");
}

#[test]
fn check_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_inst_a(dir.path());
    let feasible = rmc(&["check", inst.to_str().unwrap(), "--x", "1,1"]);
    assert_eq!(feasible.status.code(), Some(0));
    assert!(stdout(&feasible).contains("FEASIBLE"));

    let violating = rmc(&["check", inst.to_str().unwrap(), "--x", "1,0"]);
    assert_eq!(violating.status.code(), Some(0));
    let text = stdout(&violating);
    assert!(text.contains("VIOLATING"), "{text}");
    assert!(text.contains("subset 2"), "{text}");
    assert!(text.contains("scenario 2 0 2"), "{text}");

    let wrong_len = rmc(&["check", inst.to_str().unwrap(), "--x", "1,0,0"]);
    assert_eq!(wrong_len.status.code(), Some(1));
}

#[test]
fn separate_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_inst_a(dir.path());
    for method in ["set", "bigm", "brute"] {
        let out = rmc(&[
            "separate",
            inst.to_str().unwrap(),
            "--x",
            "1,0",
            "--method",
            method,
        ]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        assert!(stdout(&out).contains("amount 2"), "{method}");
    }
}

#[test]
fn generate_is_deterministic_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.rmc");
    let b = dir.path().join("b.rmc");
    for path in [&a, &b] {
        let out = rmc(&[
            "generate",
            "--ni",
            "10",
            "--nj",
            "100",
            "--p",
            "0.1",
            "--k",
            "0,1",
            "--d",
            "0.5",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical files");

    // sparse construction leaves every region with exactly one edge
    let text = String::from_utf8(bytes_a).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("edge")).count(), 100);

    // and the file solves
    let out = rmc(&["solve", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generate_gamma_endpoint_writes_sum_of_lower_demands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d0.rmc");
    let out = rmc(&[
        "generate",
        "--ni",
        "5",
        "--nj",
        "12",
        "--p",
        "0.4",
        "--k",
        "2,3",
        "--d",
        "0",
        "--seed",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let gamma: u64 = text
        .lines()
        .find_map(|l| l.strip_prefix("gamma "))
        .unwrap()
        .parse()
        .unwrap();
    let sum_lower: u64 = text
        .lines()
        .filter_map(|l| l.strip_prefix("region "))
        .map(|body| body.split(' ').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(gamma, sum_lower);
}

#[test]
fn generate_geo_instance_from_street_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("streets.txt");
    std::fs::write(&graph, "nodes 3 facilities 0 2\nedge 0 1 5\nedge 1 2 5\n").unwrap();
    let out_path = dir.path().join("geo.rmc");
    let out = rmc(&[
        "generate",
        "--geo",
        graph.to_str().unwrap(),
        "--threshold",
        "8",
        "--gamma",
        "2",
        "--q",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("region")).count(), 3);

    let solve = rmc(&["solve", out_path.to_str().unwrap()]);
    assert_eq!(solve.status.code(), Some(0));
}

#[test]
fn bench_writes_the_pinned_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.csv");
    let out = rmc(&[
        "bench",
        "--ni",
        "5",
        "--nj",
        "12",
        "--p",
        "0.3",
        "--k",
        "0,1",
        "--d",
        "0,0.5,1",
        "--reps",
        "5",
        "--q",
        "3",
        "--seed",
        "41",
        "--threads",
        "2",
        "--avg-scenarios",
        "5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "id,k1,k2,d,avg_obj,robust_obj,worst_obj,solved_setf,solved_asf,time_setf_s,time_asf_s,status"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 15, "3 cells x 5 replicates");

    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 12, "{row}");
        let d: f64 = cols[3].parse().unwrap();
        let avg: u64 = cols[4].parse().unwrap();
        let robust: u64 = cols[5].parse().unwrap();
        let worst: u64 = cols[6].parse().unwrap();
        assert!(avg <= robust && robust <= worst, "{row}");
        // singleton uncertainty sets collapse the comparison
        if d == 0.0 {
            assert_eq!(avg, robust, "{row}");
        }
        if d == 1.0 {
            assert_eq!(robust, worst, "{row}");
        }
    }

    // aggregates land next to the row file
    let agg = std::fs::read_to_string(dir.path().join("bench.agg.csv")).unwrap();
    assert!(agg.starts_with(
        "k1,k2,d,avg_obj,robust_obj,worst_obj,solved_total,solved_setf,solved_asf,time_setf_s,time_asf_s"
    ));
    assert_eq!(agg.lines().count(), 4, "header plus one line per cell");
}

#[test]
fn bench_rows_are_deterministic_apart_from_times() {
    let dir = tempfile::tempdir().unwrap();
    let mut snapshots = Vec::new();
    for name in ["one.csv", "two.csv"] {
        let out_path = dir.path().join(name);
        let out = rmc(&[
            "bench",
            "--ni",
            "4",
            "--nj",
            "8",
            "--p",
            "0.4",
            "--k",
            "1,2",
            "--d",
            "0.5",
            "--reps",
            "3",
            "--seed",
            "9",
            "--threads",
            "2",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(&out_path).unwrap();
        let stripped: Vec<String> = text
            .lines()
            .map(|line| {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() == 12 {
                    // drop the two time columns
                    let mut kept = cols[..9].to_vec();
                    kept.push(cols[11]);
                    kept.join(",")
                } else {
                    line.to_string()
                }
            })
            .collect();
        snapshots.push(stripped);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let bad = rmc(&["solve"]);
    assert_eq!(bad.status.code(), Some(1));
    let help = rmc(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let unknown = rmc(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
}
