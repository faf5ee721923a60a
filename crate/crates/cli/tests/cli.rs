use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn lietp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lietp"))
        .current_dir(root())
        .env_remove("LIETP_ORACLE_CAP")
        .args(args)
        .output()
        .expect("spawn lietp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn assert_golden(args: &[&str], file: &str) {
    let o = lietp(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let want = std::fs::read_to_string(root().join("tests/data/expected").join(file)).unwrap();
    assert_eq!(stdout(&o), want, "output of {args:?} differs from {file}");
}

#[test]
fn analyze_golden() {
    assert_golden(&["analyze", "tests/data/n.poset"], "analyze_n.txt");
}

#[test]
fn halfder_golden() {
    assert_golden(&["halfder", "tests/data/crown.poset", "--oracle"], "halfder_crown.txt");
}

#[test]
fn examples_golden() {
    assert_golden(&["examples"], "examples.txt");
}

#[test]
fn tp_build_golden() {
    assert_golden(&["tp", "build", "tests/data/v.poset", "tests/data/v_params.json"], "tp_build_v.txt");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["analyze", "tests/data/branch.poset", "--u0", "3"],
        vec!["halfder", "tests/data/two_chains.poset"],
        vec!["decompose", "tests/data/two_chains.poset", "tests/data/two_chains_op.json"],
    ] {
        let a = lietp(&args);
        let b = lietp(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn analyze_examples() {
    let v = stdout(&lietp(&["analyze", "tests/data/v.poset"]));
    assert!(v.contains("X2e = {(1,2), (1,3)}\n"));
    assert!(v.contains("predicted dim = 3 + 2 + 2 = 7\n"));
    let crown = stdout(&lietp(&["analyze", "tests/data/crown.poset"]));
    assert!(crown.contains("X2e = {}\n"));
    assert!(crown.contains("cycles = 1\n"));
    let c5 = stdout(&lietp(&["analyze", "tests/data/chain5.poset"]));
    assert!(c5.contains("pair classes = 1:"));
    assert!(c5.contains("X2e = {}\n"));
}

#[test]
fn analyze_u0_changes_signs() {
    let a = stdout(&lietp(&["analyze", "tests/data/n.poset"]));
    assert!(a.contains("(2,3) sgn = -1 V = {2,4}"));
    let b = stdout(&lietp(&["analyze", "tests/data/n.poset", "--u0", "4"]));
    assert!(b.contains("u0 = 4\n"));
    assert!(b.contains("(2,4) sgn = -1"), "{b}");
}

#[test]
fn halfder_oracle_verdicts() {
    for (file, d) in [("chain3", 5), ("v", 7), ("crown", 9)] {
        let o = lietp(&["halfder", &format!("tests/data/{file}.poset"), "--oracle"]);
        assert!(o.status.success());
        let s = stdout(&o);
        assert!(s.contains(&format!("structural dim = {d}\n")), "{s}");
        assert!(s.contains(&format!("oracle dim = {d}\n")), "{s}");
        assert!(s.contains("verdict = EQUAL\n"));
    }
}

#[test]
fn oracle_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lietp"))
        .current_dir(root())
        .env("LIETP_ORACLE_CAP", "10")
        .args(["halfder", "tests/data/v.poset", "--oracle"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("25 unknowns exceeds the cap of 10"), "{err}");
    // without --oracle the cap is irrelevant
    let o = Command::new(env!("CARGO_BIN_EXE_lietp"))
        .current_dir(root())
        .env("LIETP_ORACLE_CAP", "10")
        .args(["halfder", "tests/data/v.poset"])
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn decompose_two_chains() {
    let o = lietp(&["decompose", "tests/data/two_chains.poset", "tests/data/two_chains_op.json"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("c = 0\n"));
    assert!(s.contains("sigma by class = (1,2):1 (1,3):0\n"));
    assert!(s.contains("kappa = (1, 0, 0, 0, 0)\n"));
    assert!(s.contains("PASS exact reconstruction"));
}

#[test]
fn decompose_rejects_corrupted_operator() {
    let o = lietp(&["decompose", "tests/data/two_chains.poset", "tests/data/two_chains_bad_op.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not a 1/2-derivation"), "{err}");
    assert!(err.contains("(e1, e12)"), "{err}");
}

#[test]
fn decompose_scalar_multiple_of_identity() {
    // 3·id: sigma constant 3 on the single class, c = 0.
    let dir = tempdir();
    let mut cols = Vec::new();
    for (a, b) in [("1", "1"), ("1", "2"), ("1", "3"), ("2", "2"), ("2", "3"), ("3", "3")] {
        cols.push(format!(
            r#"{{"from":"{a}","to":"{b}","image":[{{"from":"{a}","to":"{b}","numerator":"3","denominator":"1"}}]}}"#
        ));
    }
    let op = dir.join("op.json");
    std::fs::write(&op, format!(r#"{{"columns":[{}]}}"#, cols.join(","))).unwrap();
    let o = lietp(&["decompose", "tests/data/chain3.poset", op.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("c = 0\n"));
    assert!(s.contains("sigma by class = (1,2):3\n"), "{s}");
}

fn tempdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("lietp-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn tp_pipeline_round_trips() {
    let dir = tempdir();
    let table = dir.join("table.json");
    let t = table.to_str().unwrap();
    let o = lietp(&["tp", "build", "tests/data/v.poset", "tests/data/v_params.json", "-o", t]);
    assert!(o.status.success());

    let v = lietp(&["tp", "verify", "tests/data/v.poset", t]);
    assert!(v.status.success());
    let s = stdout(&v);
    for axiom in ["commutative", "associative", "transposed Leibniz", "left multiplications"] {
        assert!(s.contains(&format!("PASS {axiom}")), "{s}");
    }

    let params = dir.join("params.json");
    let d = lietp(&["tp", "decompose", "tests/data/v.poset", t, "-o", params.to_str().unwrap()]);
    assert!(d.status.success());
    let got: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&params).unwrap()).unwrap();
    let want: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("tests/data/v_params.json")).unwrap()).unwrap();
    assert_eq!(got["nu"], want["nu"]);
    assert_eq!(got["lambda"], want["lambda"]);
    assert_eq!(got["mu"], serde_json::json!([]));

    let n = lietp(&["tp", "normalize", "tests/data/v.poset", t]);
    assert!(n.status.success());
    assert!(stdout(&n).contains("rescaling = identity"));
}

#[test]
fn tp_normalize_rescales() {
    let dir = tempdir();
    let params = dir.join("p2.json");
    std::fs::write(
        &params,
        r#"{"nu":[{"x":"1","y":"3","value":"-2/3"}],"lambda":[{"x":"2","y":"3","value":"5"}],"mu":[{"x":"1","y":"1","value":"1"}]}"#,
    )
    .unwrap();
    let table = dir.join("t2.json");
    let b = lietp(&[
        "tp",
        "build",
        "tests/data/n.poset",
        params.to_str().unwrap(),
        "-o",
        table.to_str().unwrap(),
    ]);
    assert!(b.status.success(), "{}", stdout(&b));
    let n = lietp(&["tp", "normalize", "tests/data/n.poset", table.to_str().unwrap()]);
    assert!(n.status.success(), "{}", stdout(&n));
    let s = stdout(&n);
    assert!(s.contains("e13 -> -3/2 e13"), "{s}");
    assert!(s.contains("PASS nu in {0, 1}"));
}

#[test]
fn tp_build_rejects_bad_mu() {
    let dir = tempdir();
    let params = dir.join("bad_mu.json");
    std::fs::write(&params, r#"{"mu":[{"x":"1","y":"2","value":"1"}]}"#).unwrap();
    let o = lietp(&["tp", "build", "tests/data/v.poset", params.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("associativity"));
}

#[test]
fn tp_verify_flags_non_structure() {
    let dir = tempdir();
    let table = dir.join("bad_table.json");
    // e1·e1 = e12 alone is not a transposed Poisson structure
    std::fs::write(
        &table,
        r#"{"products":[{"left":{"from":"1","to":"1"},"right":{"from":"1","to":"1"},"value":[{"from":"1","to":"2","numerator":"1","denominator":"1"}]}]}"#,
    )
    .unwrap();
    let o = lietp(&["tp", "verify", "tests/data/v.poset", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("result: FAIL"));
    let d = lietp(&["tp", "decompose", "tests/data/v.poset", table.to_str().unwrap()]);
    assert_eq!(d.status.code(), Some(2));
}

#[test]
fn parse_errors_are_reported() {
    let dir = tempdir();
    let bad = dir.join("bad.poset");
    std::fs::write(&bad, "elements: 1 2 3\n1 < 2\n").unwrap();
    let o = lietp(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not connected"));
    std::fs::write(&bad, "1 < 2\n").unwrap();
    let o = lietp(&["analyze", bad.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}
