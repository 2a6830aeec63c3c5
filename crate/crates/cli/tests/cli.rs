use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn polarsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarsec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

const WORKED: [&str; 13] = [
    "design", "--family", "polar", "--n", "4", "--pb", "0.1", "--pe", "0.5", "--eps", "0.05",
    "--delta", "0.6",
];

#[test]
fn worked_design_report() {
    let out = polarsec(&[&WORKED[..], &["--bound", "2"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let d = &v["designs"][0];
    assert_eq!(d["secrecy_rate"], 0.25);
    assert_eq!(d["k_b"], 2);
    assert_eq!(d["set_a"], serde_json::json!([2]));
    assert_eq!(d["leakage_bound"], 0.53125);
}

#[test]
fn design_output_is_byte_identical() {
    let args = [
        "design",
        "--family",
        "rl",
        "--n",
        "64",
        "--pb",
        "0.05",
        "--pe",
        "0.4",
        "--eps",
        "0.01",
        "--delta",
        "0.05",
        "--samples",
        "3000",
        "--seed",
        "9",
    ];
    let a = polarsec(&args);
    let b = polarsec(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn infeasible_design_has_its_own_exit_code() {
    let mut args = WORKED.to_vec();
    args[12] = "0.2";
    let out = polarsec(&args);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["designs"][0]["secrecy_rate"], 0.0);
}

#[test]
fn invalid_input_exits_with_two() {
    let mut args = WORKED.to_vec();
    args[6] = "0.6";
    args[8] = "0.3";
    assert_eq!(polarsec(&args).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(
        &cfg,
        r#"{"families": [], "blocklengths": [4], "p_e": [0.5]}"#,
    )
    .unwrap();
    let out = polarsec(&["design", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("family"));
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(Result::unwrap).collect()
}

#[test]
fn sweep_writes_one_table_per_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let args = [
        "sweep",
        "--family",
        "polar,rl,mk",
        "--n",
        "16,32",
        "--pe",
        "0.3,0.4",
        "--samples",
        "2000",
        "--out",
        out_dir.to_str().unwrap(),
    ];
    let run = polarsec(&args);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );

    let header = csv::Reader::from_path(out_dir.join("sweep_pb0.05_pe0.3.csv"))
        .unwrap()
        .headers()
        .unwrap()
        .clone();
    let expected = [
        "p_b",
        "p_e",
        "n",
        "family",
        "variant",
        "k_b",
        "k_e",
        "R_s",
        "pe_bound",
        "leakage_bound",
        "cs",
        "upper2nd",
        "lower2nd",
        "samples",
        "seed",
        "status",
    ];
    assert_eq!(header.iter().collect::<Vec<_>>(), expected);

    for (file, cs) in [
        ("sweep_pb0.05_pe0.3.csv", 0.25),
        ("sweep_pb0.05_pe0.4.csv", 0.35),
    ] {
        let rows = read_rows(&out_dir.join(file));
        assert_eq!(rows.len(), 2 * 3 * 2);
        for r in &rows {
            let c: f64 = r[10].parse().unwrap();
            assert!((c - cs).abs() < 1e-12);
            if r[3] == *"mk" {
                assert!(r[15].starts_with("skipped"));
                continue;
            }
            let rs: f64 = r[7].parse().unwrap();
            let upper: f64 = r[11].parse().unwrap();
            assert!(rs <= upper + 1e-9);
        }
    }

    let again = dir.path().join("again");
    let mut args2 = args.to_vec();
    *args2.last_mut().unwrap() = again.to_str().unwrap();
    assert!(polarsec(&args2).status.success());
    for file in ["sweep_pb0.05_pe0.3.csv", "sweep_pb0.05_pe0.4.csv"] {
        assert_eq!(
            std::fs::read(out_dir.join(file)).unwrap(),
            std::fs::read(again.join(file)).unwrap()
        );
    }
}

#[test]
fn sweep_rows_are_reproducible_from_their_seed() {
    let out = polarsec(&[
        "sweep",
        "--family",
        "rl",
        "--n",
        "64",
        "--pe",
        "0.4",
        "--samples",
        "3000",
        "--seed",
        "5",
        "--bound",
        "2",
        "--eps",
        "0.01",
        "--delta",
        "0.05",
    ]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    let row = reader.records().next().unwrap().unwrap();
    let (rate, seed) = (row[7].to_string(), row[14].to_string());

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("row.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"families": [{{"family": "rl", "seed": {seed}}}], "blocklengths": [64],
                "p_e": [0.4], "samples": 3000, "bounds": ["bound2"], "eps": 0.01, "delta": 0.05}}"#
        ),
    )
    .unwrap();
    let design = polarsec(&["design", "--config", cfg.to_str().unwrap()]);
    let v = json(&design);
    assert_eq!(
        v["designs"][0]["secrecy_rate"].as_f64().unwrap(),
        rate.parse::<f64>().unwrap()
    );
}

#[test]
fn oracle_suite_defaults_pass() {
    let out = polarsec(&["oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["cases"].as_array().unwrap().len(), 50);
    assert!(v["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| i["pass"] == true));
}

#[test]
fn oracle_budget_and_empty_suite() {
    let out = polarsec(&["oracle", "--n", "32"]);
    assert_eq!(out.status.code(), Some(2));
    let out = polarsec(&["oracle", "--configs", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["flagged"], 0);
}

fn coefficients(v: &Value, i: usize) -> Vec<i64> {
    v["polynomials"][i]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_i64().unwrap())
        .collect()
}

#[test]
fn kernel_polynomials() {
    let g2 = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../kernels/g2.txt");
    let v = json(&polarsec(&["kernel", g2.to_str().unwrap()]));
    assert_eq!(coefficients(&v, 0), [0, 2, -1]);
    assert_eq!(coefficients(&v, 1), [0, 0, 1]);

    let v = json(&polarsec(&[
        "kernel",
        fixture("identity2.txt").to_str().unwrap(),
    ]));
    assert_eq!(coefficients(&v, 0), [0, 1, 0]);
    assert_eq!(coefficients(&v, 1), [0, 1, 0]);

    let v = json(&polarsec(&[
        "kernel",
        fixture("k16_random.txt").to_str().unwrap(),
    ]));
    assert_eq!(v["size"], 16);
    for i in 0..16 {
        let c = coefficients(&v, i);
        assert_eq!(c[0], 0);
        assert_eq!(c.iter().sum::<i64>(), 1);
        let samples = v["polynomials"][i]["samples"].as_array().unwrap();
        assert_eq!(samples[0][1], 0.0);
        assert!((samples[10][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn singular_kernel_is_rejected() {
    let out = polarsec(&["kernel", fixture("singular2.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mk_rows_use_the_kernel_file() {
    let k16 = fixture("k16_random.txt");
    let out = polarsec(&[
        "sweep",
        "--family",
        "mk",
        "--kernel",
        k16.to_str().unwrap(),
        "--n",
        "16,32,48",
        "--pe",
        "0.4",
        "--bound",
        "2",
        "--eps",
        "0.01",
        "--delta",
        "0.05",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(!rows[0][15].starts_with("skipped"));
    assert!(!rows[1][15].starts_with("skipped"));
    assert!(rows[2][15].starts_with("skipped"));
}
