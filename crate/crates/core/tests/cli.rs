use std::path::Path;
use std::process::{Command, Output};

fn modk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modk")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_verify_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c4.g6");
    for n in ["4", "5", "6", "7"] {
        let o = modk(&["gen", "--n", n, "--chi", "4", "--out", p(&corpus)]);
        assert!(o.status.success(), "{o:?}");
    }
    assert_eq!(std::fs::read_to_string(&corpus).unwrap().lines().count(), 4);
    for suite in ["main", "onemod", "structure"] {
        let report = dir.path().join(format!("{suite}.jsonl"));
        let o = modk(&["verify", "--corpus", p(&corpus), "--suite", suite, "--k", "3", "--report", p(&report)]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        assert_eq!(std::fs::read_to_string(&report).unwrap().lines().count(), 4);
        let csv = std::fs::read_to_string(dir.path().join(format!("{suite}.jsonl.summary.csv"))).unwrap();
        assert!(csv.starts_with("check,pass,fail,skipped\nrecords,4,0,0\n"), "{csv}");
    }
    let report = dir.path().join("borrowed.jsonl");
    let o = modk(&["verify", "--suite", "borrowed", "--n-max", "5", "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
}

#[test]
fn usage_and_input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.jsonl");
    assert_eq!(modk(&["verify", "--suite", "main", "--k", "3", "--report", p(&report)]).status.code(), Some(1));
    assert_eq!(modk(&["census", "--graph6", "C", "--mod", "3"]).status.code(), Some(1));
    assert_eq!(modk(&["gen", "--n", "12", "--chi", "4", "--out", p(&report)]).status.code(), Some(1));
    let five = dir.path().join("c5.g6");
    assert!(modk(&["gen", "--n", "5", "--chi", "5", "--out", p(&five)]).status.success());
    let o = modk(&["verify", "--corpus", p(&five), "--suite", "structure", "--k", "4", "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(modk(&["verify", "--suite", "nonsense", "--report", p(&report)]).status.code(), Some(1));
}

#[test]
fn ingest_reports_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.g6");
    std::fs::write(&input, "C~\nC~\nDhc\n").unwrap();
    let out = dir.path().join("out.g6");
    let o = modk(&["ingest", "--in", p(&input), "--chi", "4", "--out", p(&out)]);
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["accepted"], 1);
    assert_eq!(summary["duplicates"], 1);
    assert_eq!(summary["not_critical"], 1);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "C~\n");
}

#[test]
fn census_output() {
    let o = modk(&["census", "--graph6", "C~", "--mod", "3", "--emit-cycles"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["counts"], serde_json::json!([4, 3, 0]));
    assert_eq!(v["cycles"].as_array().unwrap().len(), 4);
    let o = modk(&["census", "--graph6", "D~{", "--mod", "4", "--residue", "1"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["counts"][1], 12);
    assert_eq!(v["vertex_incidence"], serde_json::json!([12, 12, 12, 12, 12]));
}

#[test]
fn construct_procedures() {
    let o = modk(&["construct", "--graph6", "C~", "--proc", "lemma5"]);
    assert_eq!(stdout(&o), "1: 1 2 3\n2: 2 3 1\n3: 3 1 2\n");
    let o = modk(&["construct", "--graph6", "C~", "--proc", "lemma5", "--args", "sigma=1-3-2,v=0"]);
    assert_eq!(stdout(&o), "1: 1 3 2\n2: 2 1 3\n3: 3 2 1\n");
    let o = modk(&["construct", "--graph6", "C~", "--proc", "injection"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = modk(&["construct", "--graph6", "D~{", "--proc", "onemod", "--args", "v=2"]);
    assert_eq!(stdout(&o).lines().count(), 12);
    let o = modk(&["construct", "--graph6", "D~{", "--proc", "thm3", "--args", "edge=0-1,r=4"]);
    let lines = stdout(&o);
    assert!(lines.lines().count() >= 3);
    assert!(lines.lines().all(|l| l.split(' ').count() == 4));
    let o = modk(&["construct", "--graph6", "Dhc", "--proc", "thm3", "--args", "r=3,k=3"]);
    assert_eq!(o.status.code(), Some(1));
}
