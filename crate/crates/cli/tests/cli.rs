use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mzf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzf"))
        .args(args)
        .env_remove("MZF_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = mzf(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn code(args: &[&str]) -> i32 {
    mzf(args).status.code().unwrap()
}

#[test]
fn zeta_two() {
    let out = ok(&["eval", "--kind", "mzf", "--s", "2+0i", "--N", "1000000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let re = v["value"][0].as_f64().unwrap();
    let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
    // Tail of sum 1/n^2 beyond N is about 1/N.
    assert!((re - (pi2_6 - 1e-6)).abs() < 1e-9, "{re}");
    assert_eq!(v["kind"], "mzf");
}

#[test]
fn theorem_residuals_decrease() {
    let out = ok(&[
        "eval", "--kind", "theorem", "--shape", "1", "--s", "3+0i", "--N-list", "125,250,500,1000", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let res: Vec<f64> = v["refinements"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["residual"].as_f64().unwrap())
        .collect();
    assert_eq!(res.len(), 4);
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
}

#[test]
fn theorem_csv_has_one_row_per_cutoff() {
    let out = ok(&[
        "eval", "--kind", "theorem", "--s", "1.5,2.5", "--N-list", "100,200", "--format", "csv",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "N,lhs_re,lhs_im,rhs_re,rhs_im,residual");
    assert!(lines[1].starts_with("100,"));
    assert!(lines[2].starts_with("200,"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["eval", "--kind", "mzf", "--s", "0.5+0i", "--N", "100"]), 2);
    assert_eq!(code(&["eval", "--kind", "mzf", "--s", "2+xi", "--N", "100"]), 3);
    assert_eq!(code(&["eval", "--kind", "mzf", "--s", "2"]), 3);
    assert_eq!(code(&["no-such-command"]), 3);
    assert_eq!(code(&["eval", "--kind", "mzf", "--s", "2", "--N", "100", "--max-n", "50"]), 4);
    assert_eq!(code(&["relations", "--weight", "9", "--family", "cyclic", "--max-weight", "8"]), 4);
    assert_eq!(
        code(&["decompose", "--shape", "1,1", "--set", "custom", "--constraints", "n_{1,1} <= n_{2,1}", "--exponents", "n_{1,1}:0 n_{2,1}:0"]),
        5
    );
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn domain_report() {
    let out = ok(&["domain", "--shape", "2", "--s", "0.5+0i,1.2+0i"]);
    assert!(out.contains("outside W: Re(s_{1,1})+Re(s_{1,2}) = 1.7 <= 2"), "{out}");
    let out = ok(&["domain", "--shape", "1;1", "--s", "1.5+0i,1.6+1i"]);
    assert!(out.starts_with("inside W"), "{out}");
    assert_eq!(out.matches("margin").count(), 3);
    let out = ok(&["domain", "--shape", "1", "--s", "2.5+0i", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["inside"], true);
}

#[test]
fn decompose_examples() {
    let out = ok(&["decompose", "--shape", "1", "--set", "S_ij", "--i", "1", "--j", "1", "--exponents", "n_{1,1}:1 n:2"]);
    assert_eq!(out.lines().next(), Some("ζ(1,2)"));
    let out = ok(&["decompose", "--shape", "1", "--set", "S_i", "--i", "1", "--exponents", "n_{1,1}:2 n:1"]);
    assert_eq!(out.lines().next(), Some("ζ(3)"));
    let out = ok(&[
        "decompose", "--shape", "1,1", "--set", "custom", "--constraints", "n_{1,1} <= n_{2,1}", "--count", "--N", "4",
    ]);
    assert_eq!(out.lines().next(), Some("10"));
    assert_eq!(code(&["decompose", "--shape", "1", "--set", "S_i", "--i", "1", "--exponents", "n_{1,1}:2"]), 3);
}

#[test]
fn relations_then_rank() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w3.json");
    let f = file.to_str().unwrap();
    ok(&["relations", "--weight", "3", "--family", "cyclic", "--out", f]);
    assert_eq!(ok(&["rank", "--in", f]).trim(), "1");

    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"weight": 3, "family": "cyclic", "symbols": [], "rows": []}"#).unwrap();
    assert_eq!(ok(&["rank", "--in", empty.to_str().unwrap()]).trim(), "0");

    fs::write(&empty, "{ not json").unwrap();
    assert_eq!(code(&["rank", "--in", empty.to_str().unwrap()]), 3);
    assert_eq!(code(&["rank", "--in", dir.path().join("missing.json").to_str().unwrap()]), 1);
}

#[test]
fn table1_small() {
    let out = ok(&["table1", "--max-weight", "5", "--format", "csv"]);
    assert_eq!(
        out,
        "weight,csf,derivation,cyclic,all_reference\n3,1,1,1,1\n4,2,2,2,3\n5,4,5,5,6\n"
    );
    let text = ok(&["table1", "--max-weight", "3"]);
    assert!(text.contains("(ref)"));
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn cache_hit_and_corruption() {
    let cache = tempfile::tempdir().unwrap();
    let c = cache.path().to_str().unwrap();
    let args = ["relations", "--weight", "5", "--family", "derivation", "--cache-dir", c];
    let cold = ok(&args);
    let files = cache_files(cache.path());
    assert_eq!(files.len(), 1);
    let warm = mzf(&args);
    assert_eq!(stdout(&warm), cold);
    assert!(stderr(&warm).is_empty(), "{}", stderr(&warm));

    let text = fs::read_to_string(&files[0]).unwrap();
    fs::write(&files[0], &text[..text.len() / 2]).unwrap();
    let again = mzf(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again), cold);
    assert!(stderr(&again).contains("warning"), "{}", stderr(&again));
    assert_eq!(fs::read_to_string(&files[0]).unwrap(), text);
}

#[test]
fn cache_env_overrides_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mzf"))
        .args(["relations", "--weight", "3", "--family", "csf", "--cache-dir"])
        .arg(flag_dir.path())
        .env("MZF_CACHE_DIR", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cache_files(env_dir.path()).len(), 1);
    assert!(cache_files(flag_dir.path()).is_empty());
}

#[test]
fn parallel_output_is_deterministic() {
    for family in ["cyclic", "csf", "derivation"] {
        let serial = ok(&["relations", "--weight", "7", "--family", family]);
        let parallel = ok(&["relations", "--weight", "7", "--family", family, "--parallel", "4"]);
        assert_eq!(serial, parallel, "{family}");
    }
}
