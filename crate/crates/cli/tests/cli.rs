use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn jsnot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jsnot"))
        .args(args)
        .env_remove("JSNOT_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn translate_tshirt() {
    let o = jsnot(&["translate", corpus("tshirt.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("props") && s.contains("¬req"), "{s}");
}

#[test]
fn translate_back_gives_json() {
    let dir = tempfile::tempdir().unwrap();
    let alg = dir.path().join("t.alg");
    let o = jsnot(&[
        "translate",
        corpus("tshirt.json").to_str().unwrap(),
        "--out",
        alg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = jsnot(&["translate", alg.to_str().unwrap(), "--mode", "back"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let back = jsnot::json::parse_json(&stdout(&o)).unwrap();
    assert!(back.get("not").is_some());
}

#[test]
fn missing_input_is_an_error() {
    let o = jsnot(&["translate", "no-such-file.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn notelim_negated_root_is_negation_free() {
    let o = jsnot(&[
        "notelim",
        "--negate-root",
        "--oneof",
        "naive",
        corpus("tshirt.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let d = jsnot::algebra::parse_document(&stdout(&o)).unwrap();
    assert!(jsnot::notelim::is_negation_free(&d));
}

#[test]
fn notelim_stats_and_targets() {
    let path = corpus("contains.json");
    let o = jsnot(&["notelim", "--negate-root", "--stats", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let err = stderr(&o);
    assert!(
        err.starts_with("file\telapsed_ms\tinput_chars\toutput_chars\tratio\n"),
        "{err}"
    );
    for target in ["extended", "draft2019", "draft06_with_not"] {
        let o = jsnot(&["notelim", "--negate-root", "--target", target, path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(jsnot::json::parse_json(&stdout(&o)).is_ok());
    }
}

#[test]
fn unguarded_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.alg");
    fs::write(&p, "x defs(x: ¬x)").unwrap();
    for cmd in ["notelim", "check"] {
        let o = jsnot(&[cmd, p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        assert!(format!("{}{}", stdout(&o), stderr(&o)).contains("unguarded"));
    }
}

#[test]
fn validate_prints_one_line_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    fs::write(&inst, r#"{"a":{"a":"foo"}}"#).unwrap();
    let schema = corpus("notelim-example.json");
    let at = format!("@{}", inst.display());
    let o = jsnot(&["validate", schema.to_str().unwrap(), "1", r#"{"b":2}"#, &at]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\ntrue\ntrue\n");
    let o = jsnot(&["validate", schema.to_str().unwrap(), "1", r#"{"a":1}"#]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "true\nfalse\n");
}

#[test]
fn equiv_exit_codes() {
    let a = corpus("tshirt.json");
    let o = jsnot(&[
        "equiv",
        a.to_str().unwrap(),
        corpus("tshirt-rewritten.json").to_str().unwrap(),
        "--n",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("indistinguishable"));
    let o = jsnot(&["equiv", a.to_str().unwrap(), corpus("address.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("counterexample: "));
}

#[test]
fn bad_seed_variable() {
    let o = Command::new(env!("CARGO_BIN_EXE_jsnot"))
        .args(["check", corpus("tshirt.json").to_str().unwrap()])
        .env("JSNOT_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("JSNOT_SEED"));
}

#[test]
fn corpus_report_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["tshirt.json", "tuple.json", "numeric.json", "linked-list.json"] {
        fs::copy(corpus(name), dir.path().join(name)).unwrap();
    }
    fs::write(dir.path().join("broken.json"), r##"{"$ref":"#/missing"}"##).unwrap();
    let run = || jsnot(&["corpus", dir.path().to_str().unwrap(), "--no-timings", "--verify", "50"]);
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(2));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    let files: Vec<&str> = s
        .lines()
        .skip(1)
        .take(5)
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(
        files,
        [
            "broken.json",
            "linked-list.json",
            "numeric.json",
            "tshirt.json",
            "tuple.json"
        ]
    );
    assert!(s.starts_with("file\tok\telapsed_ms\tinput_chars\toutput_chars\tratio\twarnings\n"));
    assert!(s.contains("size ratio\tavg\tmedian\tmax\n"));
    assert!(!s.contains("runtime"));

    let tsv = dir.path().join("report.tsv");
    let o = jsnot(&[
        "corpus",
        dir.path().to_str().unwrap(),
        "--report",
        tsv.to_str().unwrap(),
    ]);
    let report = fs::read_to_string(&tsv).unwrap();
    assert_eq!(report.lines().count(), 6);
    assert!(stdout(&o).contains("runtime (ms)\tavg\tavg/KB\n"));
}
