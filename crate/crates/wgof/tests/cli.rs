use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wgof::manifest::sha256_hex;
use wgof_core::{Philox4x32, RandomSource};

fn wgof(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgof"))
        .args(["--reps-critical", "4000", "--reps-power", "500", "--out-dir"])
        .arg(dir)
        .args(args)
        .env_remove("WGOF_CACHE")
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn manifest(dir: &Path, command: &str) -> serde_json::Value {
    let text = fs::read_to_string(dir.join(format!("{command}.manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn header(path: &Path) -> csv::StringRecord {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    csv::Reader::from_reader(body.as_bytes()).headers().unwrap().clone()
}

fn column(path: &Path, name: &str) -> usize {
    header(path)
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn stat_on_uniform_data_with_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("u.txt");
    let mut rng = Philox4x32::new(4, 0);
    let text: String = (0..100).map(|_| format!("{}\n", rng.uniform())).collect();
    fs::write(&data, text).unwrap();
    let out = wgof(tmp.path(), &["stat", "--input", data.to_str().unwrap()]);
    ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("statistic,n,value,critical_value,reject"));
    assert_eq!(stdout.lines().count(), 6);

    let m = manifest(tmp.path(), "stat");
    assert_eq!(m["seeds"][0], 20_190_301);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    let bytes = fs::read(tmp.path().join("stat.csv")).unwrap();
    assert_eq!(outputs[0]["sha256"], sha256_hex(&bytes));
}

#[test]
fn empty_input_is_a_structured_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("empty.txt");
    fs::write(&data, "# nothing here\n\n").unwrap();
    let out = wgof(tmp.path(), &["stat", "--input", data.to_str().unwrap()]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "empty_sample");
    assert!(err["message"].as_str().unwrap().contains("empty sample"));
}

#[test]
fn values_outside_the_unit_interval_name_their_line() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("bad.txt");
    fs::write(&data, "0.2\n0.5\n1.5\n").unwrap();
    let out = wgof(tmp.path(), &["stat", "--input", data.to_str().unwrap()]);
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.txt:3:"), "{msg}");
}

#[test]
fn gaussian_null_accepts_gaussian_data() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("g.txt");
    let mut rng = Philox4x32::new(8, 0);
    let text: String = (0..500)
        .map(|_| format!("{}\n", 3.0 + 2.0 * wgof_core::special::norm_quantile(rng.uniform())))
        .collect();
    fs::write(&data, text).unwrap();
    let out = wgof(
        tmp.path(),
        &[
            "stat",
            "--input",
            data.to_str().unwrap(),
            "--null",
            "gaussian(3,2)",
            "--statistics",
            "ks",
        ],
    );
    ok(&out);
    let rows = csv_rows(&tmp.path().join("stat.csv"));
    let v: f64 = rows[0][2].parse().unwrap();
    // far below the 0.001 point of the Kolmogorov law
    assert!(v < 1.95, "{v}");
}

#[test]
fn critvals_reuse_the_cache_and_refuse_conflicts() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("shared.csv");
    let run = |dir: &str, seed: &str, workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_wgof"))
            .args([
                "--reps-critical",
                "3000",
                "--seed",
                seed,
                "--workers",
                workers,
                "--out-dir",
            ])
            .arg(tmp.path().join(dir))
            .args(["critvals", "--statistics", "ks,ad_int", "--n", "40,80"])
            .env("WGOF_CACHE", &cache)
            .output()
            .unwrap()
    };
    ok(&run("a", "5", "1"));
    let first = fs::read(tmp.path().join("a/critvals.csv")).unwrap();
    let cached = fs::read(&cache).unwrap();
    assert!(String::from_utf8_lossy(&cached).starts_with("# wgof critical-values v1"));
    ok(&run("b", "5", "3"));
    assert_eq!(fs::read(tmp.path().join("b/critvals.csv")).unwrap(), first);
    assert_eq!(fs::read(&cache).unwrap(), cached);

    let out = run("c", "6", "1");
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "cache");
}

#[test]
fn power_output_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wgof(
        tmp.path(),
        &[
            "power",
            "--model",
            "m1 mu=0.3",
            "--statistics",
            "ks,ad_int",
            "--n",
            "50,100",
        ],
    );
    ok(&out);
    let path = tmp.path().join("power.csv");
    assert!(fs::read_to_string(&path).unwrap().starts_with("# wgof power v1"));
    assert_eq!(
        header(&path).iter().collect::<Vec<_>>(),
        ["family", "params", "statistic", "n", "alpha", "power", "stderr", "seed"]
    );
    assert_eq!(csv_rows(&path).len(), 4);
    assert!(tmp.path().join("critical_values.csv").exists());

    let out = wgof(
        tmp.path(),
        &[
            "power",
            "--model",
            "m4 beta=4 pi=0.1",
            "--statistics",
            "ks",
            "--n",
            "100",
            "--param",
            "pi",
            "--values",
            "0,0.1,0.2",
        ],
    );
    ok(&out);
    assert_eq!(csv_rows(&path).len(), 3);

    let out = wgof(
        tmp.path(),
        &[
            "power",
            "--model",
            "m1 mu=0.3",
            "--n",
            "50,100",
            "--param",
            "mu",
            "--values",
            "0.1",
        ],
    );
    assert!(!out.status.success());
    let out = wgof(tmp.path(), &["power", "--model", "m1 mu=0", "--n", "50"]);
    assert!(!out.status.success());
}

#[test]
fn efficiency_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wgof(
        tmp.path(),
        &[
            "efficiency",
            "--shape",
            "m3 p=0.05 mu=2.0",
            "--shape",
            "m1 mu=2.0",
            "--shape",
            "tt",
            "--shape",
            "m5 delta=0.3 p=0.1",
        ],
    );
    ok(&out);
    let path = tmp.path().join("efficiency.csv");
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 4);
    let ek = column(&path, "e_ek");
    let ik = column(&path, "e_ik");
    let f = |r: usize, c: usize| -> f64 { rows[r][c].parse().unwrap() };
    // M3's normalized shape is M1's with the same mean
    assert!((f(0, ek) - f(1, ek)).abs() < 1e-9 * f(1, ek));
    assert!((f(0, ik) - f(1, ik)).abs() < 1e-6 * f(1, ik));
    assert!((f(2, ek) - 1.0).abs() < 1e-8);
    assert!((f(2, ik) - 4.0 / 3.0).abs() < 1e-8);
    assert_eq!(&rows[3][ek], "inf");

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("efficiency.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
}

#[test]
fn probe_writes_rows_and_regime_notes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wgof(
        tmp.path(),
        &[
            "probe",
            "--statistic",
            "ks",
            "--w-rule",
            "power:1.5:0.45",
            "--n-grid",
            "100,400",
            "--reps",
            "5000",
        ],
    );
    ok(&out);
    let rows = csv_rows(&tmp.path().join("probe.csv"));
    assert_eq!(rows.len(), 2);
    let m = manifest(tmp.path(), "probe");
    let notes: Vec<&str> = m["notes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(notes.contains(&"regime: non-degenerate"), "{notes:?}");
}

#[test]
fn figure_series_names() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wgof(tmp.path(), &["figures", "fig1", "--n-grid", "50,100", "--n-cap", "200"]);
    ok(&out);
    let rows = csv_rows(&tmp.path().join("fig1.csv"));
    let series: std::collections::BTreeSet<String> = rows.iter().map(|r| r[0].to_string()).collect();
    for m in ["m1 mu=0.15", "m2 sigma=0.75"] {
        for prefix in ["a", "astar", "t0m0"] {
            assert!(
                series.contains(&format!("{prefix}/{m}")),
                "{prefix}/{m} missing from {series:?}"
            );
        }
        for stat in ["ej:half-root", "ej:nine-tenths", "ad_int", "ad_log", "ks"] {
            assert!(
                series.contains(&format!("power/{stat}/{m}")),
                "power/{stat}/{m} missing"
            );
        }
        assert!(series.contains(&format!("zoom/ks@n*e_ek/{m}")));
        assert!(series.contains(&format!("zoom/ks@n*e_ik/{m}")));
    }
    for f in [
        "fig1.csv",
        "fig1_power.csv",
        "fig1_efficiency.csv",
        "figures.manifest.json",
    ] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }

    let out = wgof(
        tmp.path(),
        &["figures", "fig3", "--sweep-n", "50", "--sweep-points", "2"],
    );
    ok(&out);
    let m = manifest(tmp.path(), "figures");
    let notes = m["notes"].to_string();
    assert!(notes.contains("corrected"), "{notes}");
    assert!(!tmp.path().join("fig3_efficiency.csv").exists());
}
