use std::fs;
use std::path::Path;
use std::process::{Command, Output};

/// Runs `fpp` with whitespace-separated arguments.
fn fpp(dir: &Path, args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpp"))
        .args(args.split_whitespace())
        .current_dir(dir)
        .env_remove("FPP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const FPRF_SIM: &str =
    "simulate-fprf --alpha1 0.9 --alpha2 0.75 --lambda 100 --window 5 --delta 0.0005 --seed 42 --out pts.csv";

const FPRF_PMF: &str = "pmf --process fprf --alpha1 0.5 --alpha2 0.75 --lambda 10 --t1 5 --t2 5 --n-mc 1500 --seed 7";

#[test]
fn simulate_fprf_writes_points_and_drivers() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpp(dir.path(), FPRF_SIM);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let points = fs::read_to_string(dir.path().join("pts.csv")).unwrap();
    assert!(points.starts_with("x,y\n"));
    assert!(points.lines().count() > 100);
    for line in points.lines().skip(1) {
        let xy: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(xy.iter().all(|&v| (0.0..=5.0).contains(&v)));
    }
    for driver in ["pts_driver1.csv", "pts_driver2.csv"] {
        let text = fs::read_to_string(dir.path().join(driver)).unwrap();
        assert!(text.starts_with("s,Y\n"));
        let times: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
        assert!(*times.last().unwrap() > 5.0);
    }
}

#[test]
fn simulation_reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    fpp(a.path(), FPRF_SIM);
    fpp(b.path(), FPRF_SIM);
    for name in ["pts.csv", "pts_driver1.csv", "pts_driver2.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn fprf_pmf_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let one = fpp(dir.path(), FPRF_PMF);
    assert_eq!(one.status.code(), Some(0));
    let text = stdout(&one);
    assert!(text.starts_with("k,p,se\n"));
    assert_eq!(text.lines().count(), 32);
    let total: f64 = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!(total > 0.0 && total <= 1.0 + 1e-12);
    assert_eq!(text, stdout(&fpp(dir.path(), &format!("{FPRF_PMF} --jobs 3"))));
}

#[test]
fn simulations_default_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_fpp"))
        .args(["simulate-fpp", "--alpha", "0.7", "--lambda", "3", "--t-end", "2", "--seed", "5"])
        .env("FPP_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.path().join("fpp_events.csv")).unwrap();
    assert!(text.starts_with("t\n"));
}

#[test]
fn ml_eval_matches_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpp(dir.path(), "ml-eval --alpha 1 --z 1,-2");
    let values: Vec<f64> =
        stdout(&out).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!((values[0] - 1f64.exp()).abs() < 1e-12);
    assert!((values[1] - (-2f64).exp()).abs() < 1e-12);
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpp(dir.path(), "moments --process fpp --alpha 1 --lambda 2 --t 3 --format json");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["mean"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert!((report["var"].as_f64().unwrap() - 6.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let mixed =
        fpp(dir.path(), "simulate-mfpp --alpha1 0.5 --alpha2 0.9 --c1 0.6 --c2 0.6 --lambda 1 --t-end 1 --seed 1");
    assert_eq!(mixed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mixed.stderr).contains("C1+C2 must equal 1"));

    let missing_seed = fpp(dir.path(), "simulate-fpp --alpha 0.5 --lambda 1 --t-end 1");
    assert_eq!(missing_seed.status.code(), Some(1));
    let mc_without_seed = fpp(dir.path(), "pmf --process fprf --alpha1 0.5 --alpha2 0.5 --lambda 1 --t1 1 --t2 1");
    assert_eq!(mc_without_seed.status.code(), Some(1));
    let bad_alpha = fpp(dir.path(), "pmf --process fpp --alpha 1.5 --lambda 1 --t 1");
    assert_eq!(bad_alpha.status.code(), Some(1));
    assert_eq!(fpp(dir.path(), "no-such-command").status.code(), Some(1));
    assert_eq!(fpp(dir.path(), "validate --suite nonsense --seed 1").status.code(), Some(1));
    assert_eq!(fpp(dir.path(), "--help").status.code(), Some(0));
}

#[test]
fn validate_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpp(dir.path(), "validate --suite special-functions --seed 1");
    assert_eq!(out.status.code(), Some(0));
    let entries: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["pass"] == true && e["seed"] == 1));
}
