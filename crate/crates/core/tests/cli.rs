use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sharq::cli::embedded_config;
use tempfile::TempDir;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name)
}

fn sharq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, sub: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    sharq(&args)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn zero_trials_exits_2_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        "outage",
        &preset("figure4_b.json"),
        &["--trials", "0"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`trials`"), "{}", stderr(&out));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"seed": 1, "trails": 10}"#).unwrap();
    let out = run_in(dir.path(), "outage", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("trails"));

    fs::write(&cfg, r#"{"seed": 1}"#).unwrap();
    let out = run_in(dir.path(), "outage", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`channel`"));

    let out = sharq(&["outage"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sharq(&["simulate", "--config", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_config_exits_4() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "outage", &dir.path().join("missing.json"), &[]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn enumeration_cap_exits_3() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(preset("oracle_two_point.json")).unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&text).unwrap();
    cfg["oracle"]["cap"] = 255.into();
    let path = dir.path().join("cfg.json");
    fs::write(&path, cfg.to_string()).unwrap();
    let out = run_in(dir.path(), "oracle-check", &path, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("256"));
}

#[test]
fn failed_oracle_check_exits_1_and_still_reports() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(preset("oracle_two_point.json")).unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(&text).unwrap();
    cfg["oracle"]["floor"] = 0.0.into();
    let path = dir.path().join("cfg.json");
    fs::write(&path, cfg.to_string()).unwrap();
    let out = run_in(dir.path(), "oracle-check", &path, &["--trials", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("oracle_check.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["pass"], false);
}

#[test]
fn passing_oracle_check() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        "oracle-check",
        &preset("oracle_two_point.json"),
        &["--trials", "200000"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("oracle_check.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["outcomes"], 256);
    assert_eq!(
        report["result"]["comparisons"][0]["exact_rational"],
        "81/4096"
    );
}

#[test]
fn eve_slice_is_the_rectangle() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "regions", &preset("figure3.json"), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("region_eve_sharq_K2_M1.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(lines.next(), Some("x,y,member"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (x, y): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let inside = x <= 2.5 && y <= 2.0;
        assert_eq!(f[2], if inside { "1" } else { "0" }, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 101 * 101);
    assert!(!text.contains('\r'));
}

#[test]
fn cdf_writes_four_files_for_the_four_layouts() {
    let dir = TempDir::new().unwrap();
    for tag in ["a", "b", "c", "d"] {
        let cfg = preset(&format!("figure4_{tag}.json"));
        let out = run_in(dir.path(), "cdf", &cfg, &["--trials", "5000"]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let names: Vec<String> = read_dir_sorted(dir.path())
        .into_iter()
        .map(|(n, _)| n)
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(
        names,
        [
            "delta_cdf_K1_M6.csv",
            "delta_cdf_K2_M3.csv",
            "delta_cdf_K3_M2.csv",
            "delta_cdf_K6_M1.csv"
        ]
    );
    let a = fs::read_to_string(dir.path().join("delta_cdf_K1_M6.csv")).unwrap();
    assert!(a.ends_with("delta,cdf\n0,1\n"));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let cases: [(&str, &str, &[&str]); 4] = [
        ("regions", "figure2.json", &[]),
        ("outage", "figure4_c.json", &["--trials", "20000"]),
        ("throughput", "figure4_b.json", &["--trials", "3000"]),
        ("cdf", "figure4_d.json", &["--trials", "20000"]),
    ];
    for (sub, cfg, extra) in cases {
        let (one, eight) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        for (dir, w) in [(&one, "1"), (&eight, "8")] {
            let mut args = extra.to_vec();
            args.extend(["--workers", w]);
            let out = run_in(dir.path(), sub, &preset(cfg), &args);
            assert!(out.status.success(), "{sub}: {}", stderr(&out));
        }
        assert_eq!(
            read_dir_sorted(one.path()),
            read_dir_sorted(eight.path()),
            "{sub}"
        );
    }
}

#[test]
fn embedded_config_reproduces_each_file() {
    let first = TempDir::new().unwrap();
    let runs = [
        (
            "outage",
            "figure4_b.json",
            vec!["--trials", "4000", "--seed", "11"],
        ),
        ("cdf", "figure4_c.json", vec!["--trials", "4000"]),
        ("regions", "figure3.json", vec![]),
    ];
    for (sub, cfg, extra) in &runs {
        let out = run_in(first.path(), sub, &preset(cfg), extra);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for (name, bytes) in read_dir_sorted(first.path()) {
        let text = String::from_utf8(bytes).unwrap();
        let cfg = embedded_config(&text).unwrap();
        let again = TempDir::new().unwrap();
        let path = again.path().join("embedded.json");
        fs::write(&path, cfg.to_compact_json()).unwrap();
        let sub = match name.as_str() {
            n if n.starts_with("outage") => "outage",
            n if n.starts_with("delta") => "cdf",
            _ => "regions",
        };
        let out = run_in(&again.path().join("out"), sub, &path, &[]);
        assert!(out.status.success(), "{}", stderr(&out));
        let reproduced = fs::read_to_string(again.path().join("out").join(&name)).unwrap();
        assert_eq!(reproduced, text, "{name}");
    }
}

#[test]
fn inputs_are_left_untouched() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    let original = fs::read(preset("figure4_b.json")).unwrap();
    fs::write(&cfg, &original).unwrap();
    let out = run_in(dir.path(), "outage", &cfg, &["--trials", "1000"]);
    assert!(out.status.success());
    assert_eq!(fs::read(&cfg).unwrap(), original);
}
