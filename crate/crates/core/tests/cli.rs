//! The `fillab` binary end to end: files in, files and exit codes out.

use std::path::Path;
use std::process::{Command, Output};

use fillab::decomposition::PartitionCertificate;
use fillab::Model;

fn fillab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fillab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn cube(dir: &Path) {
    let out = fillab(
        dir,
        &["generate", "--model", "grid3", "--size", "8", "--out", "m.scx", "--surface", "cube", "--corner", "2,2,2", "--side", "3", "--hsf", "s.hsf"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_then_fill() {
    let dir = tempfile::tempdir().unwrap();
    cube(dir.path());
    let out = fillab(dir.path(), &["fill", "--complex", "m.scx", "--surface", "s.hsf", "--method", "oracle"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["method"], "oracle");
    assert_eq!(r["volume"], 6 * 27);
    assert_eq!(r["optimalityCertificate"], true);
    for key in ["radius", "coneConstant", "runtime_ms"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    let cone = json(&fillab(dir.path(), &["fill", "--complex", "m.scx", "--surface", "s.hsf", "--method", "cone"]));
    assert!(cone["volume"].as_u64().unwrap() >= 162);
}

#[test]
fn partition_writes_a_checkable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    cube(dir.path());
    let out = fillab(dir.path(), &["partition", "round", "--complex", "m.scx", "--surface", "s.hsf", "--cert", "c.cert"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["gluing"], "ok");
    let ok = fillab(dir.path(), &["check-cert", "--complex", "m.scx", "--cert", "c.cert"]);
    assert!(ok.status.success());
    assert_eq!(json(&ok)["ok"], true);

    // flip one assertion to failing and the checker has to notice
    let m = Model::read_scx(&dir.path().join("m.scx")).unwrap();
    let mut cert = PartitionCertificate::read(&dir.path().join("c.cert"), &m).unwrap();
    cert.assertions[0].pass = false;
    cert.write(&dir.path().join("bad.cert")).unwrap();
    let bad = fillab(dir.path(), &["check-cert", "--complex", "m.scx", "--cert", "bad.cert"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn every_partition_operation_runs() {
    let dir = tempfile::tempdir().unwrap();
    cube(dir.path());
    for op in ["round", "folded", "thickthin", "thickround", "pipeline"] {
        let out = fillab(dir.path(), &["partition", op, "--complex", "m.scx", "--surface", "s.hsf"]);
        assert!(out.status.code().is_some_and(|c| c <= 1), "{op}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(json(&out).get("contours").is_some());
    }
    let out = fillab(dir.path(), &["folded", "--complex", "m.scx", "--surface", "s.hsf"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["folded"], serde_json::json!([]));
}

#[test]
fn divergence_writes_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fillab(dir.path(), &["generate", "--model", "grid2", "--size", "40", "--out", "g.scx"]).status.success());
    let out = fillab(
        dir.path(),
        &["divergence", "--complex", "g.scx", "--k", "0", "--family", "pair:4,8,16", "--center", "20,20", "--csv", "d.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((json(&out)["fit"]["slope"].as_f64().unwrap() - 1.0).abs() < 0.1);
    let csv = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(csv.starts_with("# fillab-csv v1\n"));
    assert_eq!(csv.lines().count(), 5);

    let wrong_k = fillab(dir.path(), &["divergence", "--complex", "g.scx", "--k", "1", "--family", "pair:4", "--center", "20,20"]);
    assert_eq!(wrong_k.status.code(), Some(2));
}

#[test]
fn experiment_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("e.toml"),
        "experiment = \"iso-profile\"\nmodel = \"grid2\"\nfamily = \"square\"\nsizes = [4, 8, 16]\ncsv = \"a.csv\"\nsvg = \"a.svg\"\n",
    )
    .unwrap();
    let first = fillab(dir.path(), &["--threads", "2", "experiment", "e.toml"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let second = fillab(dir.path(), &["experiment", "e.toml", "--csv", "b.csv"]);
    assert!(second.status.success());
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    assert!(std::fs::read_to_string(dir.path().join("a.svg")).unwrap().contains("slope 2.00"));
    let s = json(&second);
    assert_eq!(s["summary"]["failed"], 0);
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = fillab(dir.path(), &["fill", "--complex", "nope.scx", "--surface", "nope.hsf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.scx"));
    std::fs::write(dir.path().join("e.toml"), "experiment = \"iso-profile\"\nmodel = \"grid2\"\nfamily = \"square\"\nsizes = []\n").unwrap();
    let out = fillab(dir.path(), &["experiment", "e.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty size list"));
}

#[test]
fn metric_cache_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    cube(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_fillab"))
        .current_dir(dir.path())
        .env("FILLAB_CACHE", dir.path())
        .args(["fill", "--complex", "m.scx", "--surface", "s.hsf"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["volume"], 162);
    let cached = std::fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "apsp")).count();
    assert_eq!(cached, 1);
}
