use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_irregular-entire"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("spawn");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf8"),
        String::from_utf8(out.stderr).expect("utf8"),
    )
}

#[test]
fn schedule_levels_zero() {
    let (code, out, _) = run(&["schedule", "--levels", "0"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["levels"], 0);
    assert_eq!(v["alphas"], Value::Array(vec![]));
    assert_eq!(v["betas"], Value::Array(vec![]));
}

#[test]
fn schedule_keys_keep_their_order() {
    let (_, out, _) = run(&["schedule", "--levels", "3"]);
    let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, Value>>(&out)
        .unwrap()
        .keys()
        .cloned()
        .collect();
    assert_eq!(keys, ["levels", "alphas", "betas", "tails"]);
    assert!(out.contains("10657895282069817682"), "third alpha is printed in full: {out}");
}

#[test]
fn region_example() {
    let (code, out, _) = run(&["region", "--pmin", "1", "--pmax", "6", "--steps", "6"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows.contains(&vec![2.0, 0.25, 0.5]));
    assert!(rows.contains(&vec![3.0, 1.0 / 6.0, 0.5]));
    assert!(!out.contains('\r'));
}

#[test]
fn probe_decay_rows_below_one() {
    let (code, out, _) = run(&["probe", "--omega", "power:0.1", "--level", "1", "--m", "1"]);
    assert_eq!(code, 0);
    let mut a_rows = 0;
    for line in out.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[1] == "A" {
            a_rows += 1;
            assert!(f[3].parse::<f64>().unwrap() < 1.0, "{line}");
        }
    }
    assert!(a_rows > 0);
}

#[test]
fn probe_csv_round_trips_through_json() {
    let args = ["probe", "--level", "1", "--m", "1", "--budget", "12"];
    let (_, csv, _) = run(&args);
    let (_, json, _) = run(&[&args[..], &["--format", "json"]].concat());
    let v: Value = serde_json::from_str(&json).unwrap();
    let records = v["records"].as_array().unwrap();
    let lines: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(lines.len(), records.len());
    for (line, rec) in lines.iter().zip(records) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<u64>().unwrap(), rec["index"].as_u64().unwrap());
        assert_eq!(f[1], rec["set"].as_str().unwrap());
        assert_eq!(f[2].parse::<f64>().unwrap(), rec["value_lower"].as_f64().unwrap());
        assert_eq!(f[3].parse::<f64>().unwrap(), rec["value_upper"].as_f64().unwrap());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["growth", "--function", "power:0.1", "--rmax", "64", "--points", "40"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn exit_codes_and_error_json() {
    let (code, _, err) = run(&["means", "--p", "0.3"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "InvalidArgument");

    let (code, _, err) = run(&["probe", "--level", "2", "--m", "1"]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "InfeasibleLevel");

    let (code, _, err) = run(&["means", "--function", "exp", "--rmin", "1", "--rmax", "2", "--points", "2", "--index-cap", "5"]);
    assert_eq!(code, 3);
    assert!(err.contains("ToleranceUnreachable"));

    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("lineability"));
}

#[test]
fn svg_output_is_a_polyline() {
    let (code, out, _) = run(&["region", "--format", "svg"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("<?xml"));
    assert_eq!(out.matches("<polyline").count(), 2);
    let (code, _, _) = run(&["schedule", "--format", "svg"]);
    assert_eq!(code, 2);
}

#[test]
fn weighted_membership_modes() {
    let (code, out, _) = run(&["weighted", "--function", "poly:1,2,3", "--b", "1", "--mode", "membership"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "in_Bp0");
    let (_, out, _) = run(&["weighted", "--function", "exp", "--b", "0.5", "--p", "inf", "--mode", "membership"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "outside");
}

#[test]
fn build_lists_block_coefficients() {
    let (code, out, _) = run(&["build", "--omega", "power:0.1", "--levels", "1", "--max-index", "205"]);
    assert_eq!(code, 0);
    let idx: Vec<u64> = out.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(idx, [201, 202, 203, 204, 205]);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("irregular-entire-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("region.csv");
    let (code, out, _) = run(&["region", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("p,yes_level,no_level\n"));
    std::fs::remove_dir_all(dir).unwrap();
}
