use std::path::Path;
use std::process::{Command, Output};

use hcsos::extremality::{root_of_h, root_of_q, thresholds};
use hcsos::model::Branch;
use hcsos::phase::{mu0_flips, read_csv, write_csv, PointVerdict};
use hcsos::tisgm::enumerate;

fn hcsos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcsos")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_lines(o: &Output) -> usize {
    stdout(o).lines().count() - 1
}

#[test]
fn tisgm_counts_and_usage() {
    let o = hcsos(&["tisgm", "--k", "2", "--theta", "0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_lines(&o), 3);

    let o = hcsos(&["tisgm", "--k", "2", "--theta", "1.5", "--format", "csv"]);
    assert_eq!(data_lines(&o), 1);

    let o = hcsos(&["tisgm", "--k", "2", "--theta", "0.5"]);
    let table = stdout(&o);
    for b in ["symmetric", "upper", "lower"] {
        assert!(table.contains(b), "{table}");
    }

    let o = hcsos(&["tisgm", "--k", "1", "--theta", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
    assert_eq!(hcsos(&["tisgm", "--k", "2"]).status.code(), Some(2));
    assert_eq!(hcsos(&["tisgm", "--k", "2", "--theta", "0"]).status.code(), Some(2));
}

#[test]
fn tisgm_json_is_a_solution_set() {
    let o = hcsos(&["tisgm", "--k", "3", "--theta", "0.7", "--format", "json"]);
    let set: hcsos::tisgm::SolutionSet = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(set, enumerate(3, 0.7).unwrap());
}

#[test]
fn classify_verdicts_and_missing_measures() {
    let o = hcsos(&["classify", "--k", "4", "--theta", "2", "--measure", "mu0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with(",non-extreme"), "{}", stdout(&o));

    let o = hcsos(&["classify", "--k", "2", "--theta", "0.97", "--measure", "mu1", "--format", "csv"]);
    assert!(stdout(&o).trim_end().ends_with(",extreme"), "{}", stdout(&o));

    let o = hcsos(&["classify", "--k", "2", "--theta", "1.2", "--measure", "mu1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not exist"));

    let o = hcsos(&["classify", "--k", "2", "--theta", "0.5", "--measure", "all", "--format", "csv"]);
    assert_eq!(data_lines(&o), 3);
}

fn sweep_to(dir: &Path, k: u32, lo: &str, hi: &str, steps: &str) -> Vec<u8> {
    let path = dir.join(format!("k{k}.csv"));
    let ks = k.to_string();
    let o = hcsos(&[
        "sweep", "--k", &ks, "--theta-min", lo, "--theta-max", hi, "--steps", steps, "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::read(path).unwrap()
}

#[test]
fn k2_sweep_flips_at_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = sweep_to(dir.path(), 2, "0.1", "2.5", "200");
    let recs = read_csv(bytes.as_slice()).unwrap();
    assert_eq!(recs.len(), 200);

    let table = thresholds(2).unwrap();
    let t1 = table.get("theta1").unwrap().root_found;
    let t2 = table.get("theta2").unwrap().root_found;
    let flips = mu0_flips(&recs);
    assert_eq!(flips.len(), 2, "{flips:?}");
    assert!(flips[0].0 < t1 && t1 < flips[0].1);
    assert!(flips[1].0 < t2 && t2 < flips[1].1);

    // writing the parsed records back gives the same bytes
    let mut again = Vec::new();
    write_csv(&recs, &mut again).unwrap();
    assert_eq!(again, bytes);
    assert_eq!(sweep_to(dir.path(), 2, "0.1", "2.5", "200"), bytes);
}

#[test]
fn k3_sweep_flips_at_root_found_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let recs = read_csv(sweep_to(dir.path(), 3, "0.1", "2.5", "200").as_slice()).unwrap();
    let (t3, t4) = (root_of_h(3).unwrap(), root_of_q(3).unwrap());
    let flips = mu0_flips(&recs);
    assert_eq!(flips.len(), 2, "{flips:?}");
    assert!(flips[0].0 < t3 && t3 < flips[0].1);
    assert!(flips[1].0 < t4 && t4 < flips[1].1);
}

#[test]
fn k4_sweep_has_no_extreme_mu0() {
    let dir = tempfile::tempdir().unwrap();
    let recs = read_csv(sweep_to(dir.path(), 4, "0.05", "5", "200").as_slice()).unwrap();
    for r in &recs {
        let v = r.row(Branch::Symmetric).unwrap().verdict;
        assert_ne!(v, PointVerdict::Extreme, "theta = {}", r.theta);
    }
}

#[test]
fn sweep_json_and_bad_paths() {
    let o = hcsos(&["sweep", "--k", "2", "--theta-min", "0.5", "--theta-max", "1.5", "--steps", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);

    let o = hcsos(&["sweep", "--k", "2", "--theta-min", "0.5", "--theta-max", "1.5", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));

    let o = hcsos(&["sweep", "--k", "2", "--theta-min", "1.5", "--theta-max", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn thresholds_tables() {
    let o = stdout(&hcsos(&["thresholds", "--k", "2"]));
    for name in ["theta1", "theta2", "theta5"] {
        assert!(o.contains(name), "{o}");
    }
    let o = hcsos(&["thresholds", "--k", "3", "--format", "csv"]);
    assert_eq!(data_lines(&o), 2);
    assert!(stdout(&o).contains("theta3") && stdout(&o).contains("theta4"));

    let o = hcsos(&["thresholds", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no extremality thresholds"));
}

#[test]
fn simulate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = hcsos(&[
            "simulate", "--k", "2", "--theta", "0.9", "--measure", "mu1", "--depth", "5", "--samples", "2000", "--seed",
            "11", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["stationary"].as_array().unwrap().len(), 3);

    let o = hcsos(&["simulate", "--k", "2", "--theta", "1", "--depth", "4", "--samples", "20000", "--seed", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = 20000.0_f64;
    let sigma = (2.0 / 9.0 / n).sqrt();
    for f in v["level_freqs"][0].as_array().unwrap() {
        assert!((f.as_f64().unwrap() - 1.0 / 3.0).abs() < 4.0 * sigma);
    }

    let o = hcsos(&["simulate", "--k", "2", "--theta", "1.2", "--measure", "mu2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not exist"));
}

#[test]
fn iterate_outputs() {
    let o = hcsos(&["iterate", "--m", "2", "--k", "2", "--theta", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("z = 1, 1, 1"));

    // from all ones the map falls into a 2-cycle around the unique solution
    let o = hcsos(&["iterate", "--m", "2", "--k", "2", "--theta", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no convergence"), "{}", stdout(&o));

    // started on the solution it stays there
    let sol = enumerate(2, 1.5).unwrap().solutions[0];
    let init = format!("{},{},1", sol.x * sol.x, sol.y * sol.y);
    let o = hcsos(&["iterate", "--m", "2", "--k", "2", "--theta", "1.5", "--init", &init, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "converged");
    let z = v["law"]["z"].as_array().unwrap();
    assert!((z[1].as_f64().unwrap().sqrt() - sol.y).abs() < 1e-8);

    let o = hcsos(&["iterate", "--m", "4", "--k", "2", "--theta", "0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("converged") || text.contains("no convergence"));

    assert_eq!(hcsos(&["iterate", "--m", "3", "--k", "2", "--theta", "0.8"]).status.code(), Some(1));
}
