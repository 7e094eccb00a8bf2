use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::process::{Command, Output};

use nmc_core::persist::deserialize_code;
use nmc_core::CodingScheme;
use serde_json::Value;

fn nmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmc")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const ADDITIVE: &str = r#"{
  "code": {"kind": "table", "n": 12, "k": 2, "t": 4, "delta": 0.0, "seed": 17},
  "family": {"kind": "additive", "count": null},
  "eval": {"mode": "exact", "epsilon": 0.1, "gamma": 0.0, "eta": 0.01,
           "messages": "all", "witnesses": false, "seed": 3}
}"#;

/// Outcome distribution of `Dec(Enc(s) + delta)` from the raw blobs.
fn oracle(blobs: &[Vec<u64>], delta: u64) -> Vec<BTreeMap<String, f64>> {
    let owner: HashMap<u64, usize> =
        blobs.iter().enumerate().flat_map(|(s, b)| b.iter().map(move |&x| (x, s))).collect();
    blobs
        .iter()
        .map(|blob| {
            let mut d = BTreeMap::new();
            for &x in blob {
                let key = if delta == 0 {
                    "same".to_string()
                } else {
                    match owner.get(&(x ^ delta)) {
                        Some(s) => format!("{s:x}"),
                        None => "bot".to_string(),
                    }
                };
                *d.entry(key).or_insert(0.0) += 1.0 / blob.len() as f64;
            }
            d
        })
        .collect()
}

fn half_l1(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    keys.iter().map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>() / 2.0
}

#[test]
fn additive_family_matches_blob_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", ADDITIVE);
    let code_path = dir.path().join("code.json").display().to_string();
    let report_path = dir.path().join("report.json").display().to_string();

    let out = nmc(&["build", "--config", &cfg, "--out", &code_path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let code = deserialize_code(&std::fs::read(&code_path).unwrap()).unwrap();
    let blobs: Vec<Vec<u64>> = (0..4).map(|s| code.support(s).unwrap().into_owned()).collect();

    let out = nmc(&["eval", "--config", &cfg, "--code", &code_path, "--out", &report_path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    let functions = report["functions"].as_array().unwrap();
    assert_eq!(functions.len(), 4096);

    let mut worst = 0.0f64;
    for (delta, f) in functions.iter().enumerate() {
        let want = oracle(&blobs, delta as u64);
        let cells = f["cells"].as_array().unwrap();
        assert_eq!(cells.len(), 4);
        for (s, cell) in cells.iter().enumerate() {
            assert_eq!(cell["samples"], 0);
            assert_eq!(cell["radius"], 0.0);
            let got: BTreeMap<String, f64> = serde_json::from_value(cell["dist"].clone()).unwrap();
            assert_eq!(got.len(), want[s].len(), "delta {delta:x}, s {s}");
            for (k, p) in &want[s] {
                assert!((got[k] - p).abs() < 1e-12, "delta {delta:x}, s {s}, outcome {k}");
            }
        }
        for a in 0..4 {
            for b in a + 1..4 {
                worst = worst.max(half_l1(&want[a], &want[b]));
            }
        }
    }
    let reported = report["summary"]["max_strong_error"].as_f64().unwrap();
    assert!((reported - worst).abs() < 1e-12, "reported {reported}, oracle {worst}");
    eprintln!("max strong error over 4096 offsets: {worst}");
}

#[test]
fn same_seeds_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"code": {"kind": "mc", "n": 12, "k": 2, "t": 16},
            "family": {"kind": "bitwise", "count": 6},
            "eval": {"mode": "sampled", "samples": 400, "epsilon": 0.1, "gamma": 0.0, "eta": 0.01,
                     "messages": "all", "witnesses": true, "seed": 0},
            "attack": {"kind": "swap"},
            "output": {"format": "both"}}"#,
    );
    let mut runs = Vec::new();
    let out_path = dir.path().join("a.json").display().to_string();
    for _ in 0..2 {
        let out = nmc(&["eval", "--config", &cfg, "--seed", "11", "--out", &out_path]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let json = std::fs::read(&out_path).unwrap();
        let csv = std::fs::read(Path::new(&out_path).with_extension("csv")).unwrap();
        runs.push((json, csv));
    }
    assert_eq!(runs[0], runs[1]);
    let v: Value = serde_json::from_slice(&runs[0].0).unwrap();
    assert_eq!(v["seeds"]["code"], 11);
    assert_eq!(v["seeds"]["family"], 12);
    assert_eq!(v["seeds"]["eval"], 13);
    for f in v["functions"].as_array().unwrap() {
        for cell in f["cells"].as_array().unwrap() {
            assert_eq!(cell["samples"], 400);
            assert!(cell["radius"].as_f64().unwrap() > 0.0);
        }
    }
    let other = dir.path().join("c.json").display().to_string();
    assert!(nmc(&["eval", "--config", &cfg, "--seed", "12", "--out", &other]).status.success());
    assert_ne!(std::fs::read(&other).unwrap(), runs[0].0);
}

#[test]
fn identity_family_reports_zero_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"code": {"kind": "table", "n": 12, "k": 3, "t": 8, "seed": 2},
            "family": {"kind": "identity", "count": 5, "seed": 1}}"#,
    );
    let out = nmc(&["eval", "--config", &cfg]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["max_strong_error"], 0.0);
    for f in v["functions"].as_array().unwrap() {
        assert_eq!(f["strong"]["error"], 0.0);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"code": {"kind": "mc", "n": 12, "k": 2, "t": 5}}"#);
    assert_eq!(nmc(&["eval", "--config", &bad]).status.code(), Some(2));
    let garbled = write(dir.path(), "garbled.json", "{not json");
    assert_eq!(nmc(&["eval", "--config", &garbled]).status.code(), Some(2));
    // 2^8 words cannot hold 4 blobs of 128
    let dense = write(dir.path(), "dense.json", r#"{"code": {"kind": "table", "n": 8, "k": 2, "t": 128}}"#);
    assert_eq!(nmc(&["build", "--config", &dense]).status.code(), Some(3));
    let missing = dir.path().join("absent.json").display().to_string();
    assert_eq!(nmc(&["eval", "--config", &missing]).status.code(), Some(4));
    let ok = write(dir.path(), "ok.json", r#"{"code": {"kind": "table", "n": 8, "k": 1, "t": 2}}"#);
    let unwritable = dir.path().join("no/such/dir/out.json").display().to_string();
    assert_eq!(nmc(&["build", "--config", &ok, "--out", &unwritable]).status.code(), Some(4));
    assert_eq!(nmc(&["attack", "--config", &ok]).status.code(), Some(2));
}

fn plan_json(args: &[&str]) -> Value {
    let mut full = vec!["plan", "--json"];
    full.extend_from_slice(args);
    let out = nmc(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn plan_examples() {
    let by_name = plan_json(&["--n", "400", "--family", "bitwise", "--eps", "0.5", "--eta", "0.01"]);
    let by_size = plan_json(&["--n", "400", "--family-log-size", "800", "--eps", "0.5", "--eta", "0.01"]);
    assert_eq!(by_name, by_size);
    assert!(by_name["t0"].as_str().unwrap().parse::<u64>().unwrap() > 0);

    let out = nmc(&["plan", "--n", "400", "--family", "bitwise", "--eps", "0.5"]);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().any(|l| l.starts_with("t0 ")));

    let out = nmc(&["plan", "--n", "400", "--family-log-size", "10", "--eps", "0.5", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));

    let t0 = |eta: &str| {
        plan_json(&["--n", "400", "--family-log-size", "100", "--eps", "0.5", "--eta", eta])["t0"]
            .as_str()
            .unwrap()
            .parse::<u64>()
            .unwrap()
    };
    let seq: Vec<u64> = ["0.0001", "0.001", "0.01", "0.1", "0.5"].iter().map(|e| t0(e)).collect();
    assert!(seq.windows(2).all(|w| w[1] < w[0]), "{seq:?}");
}

#[test]
fn report_subcommand_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"code": {"kind": "table", "n": 12, "k": 6, "t": 8, "seed": 2},
            "attack": {"kind": "barrier", "n": 12, "k": 8}}"#,
    );
    let out_path = dir.path().join("r.json").display().to_string();
    assert!(nmc(&["attack", "--config", &cfg, "--out", &out_path]).status.success());
    let out = nmc(&["report", &out_path]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("attack    barrier joint="), "{text}");
    assert!(text.starts_with("code      table n=12 k=6 t=8"));
}
