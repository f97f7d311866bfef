use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mptk::matcore::{ComplexMatrix, C64};
use mptk_cli::mtx::{parse_matrix_str, read_matrix, write_matrix, Layout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn mptk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mptk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const DIAG_03: &str = "%%MatrixMarket matrix array real general\n2 2\n0\n0\n0\n3\n";
const OFF_01: &str = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 0.1\n";
const ZERO_2: &str = "%%MatrixMarket matrix coordinate real general\n2 2 0\n";

#[test]
fn seeded_complex_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = ComplexMatrix::from_fn(5, 5, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() * 1e-9));
    for layout in [Layout::Array, Layout::Coordinate] {
        let p = dir.path().join("m.mtx");
        write_matrix(&p, &m, layout).unwrap();
        let back = read_matrix(&p).unwrap();
        for (x, y) in back.as_slice().iter().zip(m.as_slice()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn hermitian_files_expand_and_validate() {
    let text = "%%MatrixMarket matrix array complex hermitian\n% lower triangle\n2 2\n2 0\n1 -1\n3 0\n";
    let m = parse_matrix_str(text).unwrap();
    assert_eq!(m[(0, 1)], C64::new(1.0, 1.0));
    assert_eq!(m.hermitian_defect(), 0.0);
}

#[test]
fn zero_perturbation_gives_zero_lhs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", ZERO_2);
    let out = mptk(&["eig-verify", "--a", s(&a), "--da", s(&da), "--partition", "1,1", "--grid", "33"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["schema"], "mptk/1");
    for r in doc["reports"].as_array().unwrap() {
        if r["bound_id"] == "GapLower" {
            // the predicted gap equals the unperturbed one
            assert_eq!(r["lhs"], r["rhs"], "{r}");
        } else {
            assert_eq!(r["lhs"].as_f64(), Some(0.0), "{r}");
        }
    }
}

#[test]
fn reports_are_reproducible_and_digest_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", OFF_01);
    let args = ["eig-verify", "--a", s(&a), "--da", s(&da), "--partition", "1,1", "--grid", "129"];
    let first = mptk(&args);
    let second = mptk(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let doc = json(&first);
    let digest = doc["inputs"]["a"]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert_eq!(doc["summary"]["violations"], 0);
    assert_eq!(doc["grid"]["points"], 129);
}

#[test]
fn single_block_gaps_serialize_as_null() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", OFF_01);
    let out = mptk(&["eig-verify", "--a", s(&a), "--da", s(&da), "--partition", "2", "--grid", "17"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["gaps"]["path_minima"][0].is_null());
}

#[test]
fn target_block_restricts_single_block_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", OFF_01);
    let base = ["eig-verify", "--a", s(&a), "--da", s(&da), "--partition", "1,1", "--grid", "33"];
    let out = mptk(&[&base[..], &["--target-block", "2"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let singles: Vec<Value> = json(&out)["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["bound_id"] == "CombinedSingle")
        .cloned()
        .collect();
    assert_eq!(singles.len(), 1);
    assert_eq!(singles[0]["components"]["block"], 2.0);
    for bad in ["0", "3"] {
        let out = mptk(&[&base[..], &["--target-block", bad]].concat());
        assert_eq!(out.status.code(), Some(2));
    }
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", OFF_01);
    let broken = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\noops\n0\n1\n");
    let out = mptk(&["eig-verify", "--a", s(&a), "--da", s(&da), "--partition", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("count mismatch"));
    let out = mptk(&["eig-verify", "--a", s(&broken), "--da", s(&da), "--partition", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    assert_eq!(mptk(&["eig-verify", "--a", s(&a)]).status.code(), Some(2));
    assert_eq!(mptk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mptk(&["--help"]).status.code(), Some(0));
}

#[test]
fn svd_verify_on_a_tall_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let b = write(
        dir.path(),
        "b.mtx",
        "%%MatrixMarket matrix coordinate real general\n3 2 2\n1 1 3\n2 2 1\n",
    );
    let db = write(
        dir.path(),
        "db.mtx",
        "%%MatrixMarket matrix coordinate complex general\n3 2 2\n3 1 0.1 0.05\n1 2 0 0.1\n",
    );
    let out = mptk(&["svd-verify", "--b", s(&b), "--db", s(&db), "--partition", "1,1", "--grid", "65"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["rows"], 3);
    assert!(doc["nullspace_distance"].as_f64().unwrap() > 0.0);
    let ids: Vec<&str> = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["bound_id"].as_str().unwrap())
        .collect();
    for id in ["Mirsky", "SvdCombinedAll", "SvdCombinedSingle", "SvdCorSin", "SvdGapLower", "SvdMVT"] {
        assert!(ids.contains(&id), "{id}");
    }
}

#[test]
fn track_dumps_every_sample() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", OFF_01);
    let dump = dir.path().join("path.json");
    let out = mptk(&[
        "track", "--a", s(&a), "--da", s(&da), "--partition", "1,1", "--grid", "9",
        "--no-adaptive", "--dump-path", s(&dump),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path: Value = serde_json::from_str(&fs::read_to_string(&dump).unwrap()).unwrap();
    let samples = path["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 9);
    assert_eq!(samples[0]["blocks"][0]["values"][0], 3.0);
    assert_eq!(samples[8]["t"], 1.0);
    assert_eq!(json(&out)["kind"], "eig");

    let out = mptk(&["track", "--a", s(&a), "--db", s(&da), "--partition", "1,1", "--dump-path", s(&dump)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_runs_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "suite.json",
        r#"{"kind": "general", "trials": 4, "seed": 9, "n_range": [2, 4], "grid_points": 33}"#,
    );
    let out = Command::new(env!("CARGO_BIN_EXE_mptk"))
        .args(["suite", "--config", s(&config)])
        .env("MPTK_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["threads"], 2);
    assert_eq!(doc["report"]["completed"], 4);

    let sequential = mptk(&["suite", "--config", s(&config), "--sequential"]);
    let mut seq = json(&sequential)["report"].clone();
    let mut par = doc["report"].clone();
    seq["wall_time_seconds"] = Value::Null;
    par["wall_time_seconds"] = Value::Null;
    assert_eq!(seq, par);

    let bad = write(dir.path(), "bad.json", r#"{"trails": 4}"#);
    assert_eq!(mptk(&["suite", "--config", s(&bad)]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_mptk"))
        .args(["suite", "--config", s(&config)])
        .env("MPTK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_tabulates_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", DIAG_03);
    let da = write(dir.path(), "da.mtx", OFF_01);
    let csv = dir.path().join("table.csv");
    let out = mptk(&[
        "compare", "--a", s(&a), "--da", s(&da), "--partition", "1,1", "--grid", "65",
        "--scales", "1,0.5,0.25", "--out", s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("scale,perturb_norm_fro"));
    let header: Vec<&str> = lines[0].split(',').collect();
    let col = header.iter().position(|h| *h == "sharpening").unwrap();
    for row in &lines[1..] {
        let sharpening: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
        assert!(sharpening >= 0.0);
    }
}
