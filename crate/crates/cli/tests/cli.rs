//! End-to-end tests of the command-line pipeline: file hand-offs between
//! stages, exit-status contract, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_platelab")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn platelab")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("platelab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_writes_the_documented_schema() {
    let dir = tmpdir("schema");
    let out = run_in(
        &dir,
        &[
            "solve",
            "--domain",
            "disk:r=1",
            "--h",
            "0.05",
            "--problem",
            "clamped",
            "--m",
            "6",
            "--out",
            "disk.json",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.join("disk.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["problem"], "clamped_bilaplacian");
    assert_eq!(v["n"], 2);
    assert_eq!(v["domain"], "disk:r=1");
    assert_eq!(v["normalization"], "L2_h");
    let eigs = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 6);
    let mut prev = 0.0;
    for e in eigs {
        let x = e.as_f64().unwrap();
        assert!(x >= prev);
        prev = x;
    }
    assert_eq!(v["residuals"].as_array().unwrap().len(), 6);
}

#[test]
fn bounds_pipeline_produces_dominating_theorem_column() {
    let dir = tmpdir("pipeline");
    for (problem, out, m) in [("clamped", "c.json", 8), ("neumann", "n.json", 3)] {
        let r = run_in(
            &dir,
            &[
                "solve",
                "--domain",
                "disk:r=1",
                "--h",
                "0.04",
                "--problem",
                problem,
                "--m",
                &m.to_string(),
                "--out",
                out,
            ],
        );
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let r = run_in(
        &dir,
        &[
            "bounds",
            "--spectrum",
            "c.json",
            "--neumann",
            "n.json",
            "--out",
            "report.csv",
        ],
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap();
    assert!(header.starts_with("k,mean,weyl_mean,levine_protter,theorem,corollary"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let (mean, lp, th, co) = (fields[1], fields[3], fields[4], fields[5]);
        assert!(th > lp, "theorem column must dominate: {line}");
        assert!(co <= th, "corollary column must not exceed theorem: {line}");
        assert!(mean >= th, "computed mean under the bound: {line}");
        rows += 1;
    }
    assert_eq!(rows, 8);
}

#[test]
fn identical_seeds_give_byte_identical_outputs() {
    let dir_a = tmpdir("det-a");
    let dir_b = tmpdir("det-b");
    let args = [
        "solve",
        "--domain",
        "lshape:a=1,b=0.5",
        "--h",
        "0.05",
        "--problem",
        "dirichlet",
        "--m",
        "5",
        "--seed",
        "7",
        "--out",
        "s.json",
    ];
    assert!(run_in(&dir_a, &args).status.success());
    assert!(run_in(&dir_b, &args).status.success());
    let a = std::fs::read(dir_a.join("s.json")).unwrap();
    let b = std::fs::read(dir_b.join("s.json")).unwrap();
    assert_eq!(a, b, "outputs differ between identical runs");
}

#[test]
fn verify_lemma_reports_jsonl_with_summary() {
    let dir = tmpdir("lemma");
    let r = run_in(
        &dir,
        &[
            "verify-lemma",
            "--cases",
            "100",
            "--seed",
            "3",
            "--out",
            "lemma.jsonl",
        ],
    );
    assert!(r.status.success());
    let text = std::fs::read_to_string(dir.join("lemma.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 101);
    for line in &lines[..100] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["holds_25"], true);
        assert_eq!(v["holds_26"], true);
    }
    let summary: serde_json::Value = serde_json::from_str(lines[100]).unwrap();
    assert_eq!(summary["summary"]["passed"], 100);
    assert_eq!(summary["summary"]["seed"], 3);
}

#[test]
fn probe_emits_passing_checks_on_the_disk() {
    let dir = tmpdir("probe");
    let r = run_in(
        &dir,
        &[
            "probe",
            "--domain",
            "disk:r=1",
            "--h",
            "0.03125",
            "--m",
            "4",
            "--pad",
            "10",
            "--tol",
            "1e-8",
            "--out",
            "probe.json",
        ],
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("probe.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "bessel"));
    assert!(checks.iter().any(|c| c["name"] == "energy_identity"));
    assert!(checks.iter().any(|c| c["name"] == "chain_k4"));
    for c in checks {
        assert_eq!(c["pass"], true, "check {c}");
    }
}

#[test]
fn rearrange_writes_profile_csv() {
    let dir = tmpdir("rearrange");
    let r = run_in(
        &dir,
        &[
            "rearrange",
            "--domain",
            "disk:r=1",
            "--h",
            "0.02",
            "--function",
            "cone",
            "--out",
            "profile.csv",
        ],
    );
    assert!(r.status.success());
    let text = std::fs::read_to_string(dir.join("profile.csv")).unwrap();
    let mut data = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(data.next().unwrap(), "s,g");
    let mut prev_g = f64::INFINITY;
    let mut rows = 0;
    for line in data {
        let (s, g) = line.split_once(',').unwrap();
        let _: f64 = s.parse().unwrap();
        let g: f64 = g.parse().unwrap();
        assert!(g <= prev_g);
        prev_g = g;
        rows += 1;
    }
    assert!(rows > 1000);
}

#[test]
fn constants_sweep_passes_and_prints_table() {
    let dir = tmpdir("constants");
    let r = run_in(&dir, &["constants", "--n-max", "64"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 65); // header + 64 rows
    for line in &lines[1..] {
        assert!(line.ends_with(",true"), "row {line}");
    }
}

#[test]
fn mask_file_round_trips_through_the_cli() {
    let dir = tmpdir("mask");
    let mask = "RASTER 2 0.125 0 0\n0000000000\n0111111110\n0111111110\n0111111110\n0000000000\n";
    std::fs::write(dir.join("strip.mask"), mask).unwrap();
    let r = run_in(
        &dir,
        &[
            "solve",
            "--domain",
            "mask:strip.mask",
            "--h",
            "0.125",
            "--problem",
            "dirichlet",
            "--m",
            "2",
            "--out",
            "strip.json",
        ],
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("strip.json")).unwrap()).unwrap();
    assert_eq!(v["h"], 0.125);
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tmpdir("config");
    std::fs::write(
        dir.join("run.conf"),
        "domain=rect:w=1,h=1\nh=0.125\nproblem=dirichlet\nm=3\nout=conf.json\n",
    )
    .unwrap();
    let r = run_in(&dir, &["solve", "--config", "run.conf"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(dir.join("conf.json").exists());
    // explicit flags win over config values
    let r = run_in(
        &dir,
        &[
            "solve",
            "--config",
            "run.conf",
            "--m",
            "5",
            "--out",
            "conf5.json",
        ],
    );
    assert!(r.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("conf5.json")).unwrap()).unwrap();
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 5);
}

#[test]
fn violated_bounds_exit_two_with_failure_list() {
    let dir = tmpdir("violated");
    // a spectrum far below any admissible plate spectrum on the unit disk
    let fake = serde_json::json!({
        "problem": "clamped_bilaplacian",
        "n": 2,
        "h": 0.05,
        "domain": "disk:r=1",
        "eigenvalues": [0.001, 0.002, 0.003],
        "residuals": [0.0, 0.0, 0.0],
        "normalization": "L2_h"
    });
    std::fs::write(
        dir.join("fake.json"),
        serde_json::to_string_pretty(&fake).unwrap(),
    )
    .unwrap();
    let r = run_in(
        &dir,
        &["bounds", "--spectrum", "fake.json", "--out", "fake.csv"],
    );
    assert_eq!(r.status.code(), Some(2));
    let stderr = String::from_utf8(r.stderr).unwrap();
    let json_start = stderr.find('{').unwrap();
    let v: serde_json::Value = serde_json::from_str(&stderr[json_start..]).unwrap();
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tmpdir("usage");
    let r = run_in(&dir, &["solve", "--domain", "disk:r=1"]);
    assert!(!r.status.success());
    let r = run_in(
        &dir,
        &[
            "solve",
            "--domain",
            "hexagon:r=1",
            "--h",
            "0.1",
            "--problem",
            "dirichlet",
            "--m",
            "2",
        ],
    );
    assert!(!r.status.success());
    assert_eq!(r.status.code(), Some(1));
}
