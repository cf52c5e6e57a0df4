use std::process::{Command, Output};

use serde_json::Value;

fn pdei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdei")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn di_writes_36_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("di.csv");
    let o = pdei(&["di", "--dataset", "bls-2022-mgmt", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 37);
    assert!(text.starts_with("sector_id,group_id,di\nS1,R1,2.173855\n"));
}

#[test]
fn reproduce_prints_grid_and_report() {
    let o = pdei(&["reproduce", "--table", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("Table 4: pDEI scores in sector S1"));
    assert!(text.contains("|delta|"));
    assert!(text.contains("48 cells: 48 ok, 0 mismatched"));

    let o = pdei(&["reproduce", "--table", "5", "--format", "json"]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let typos = report["cells"].as_array().unwrap().iter().filter(|c| c["status"] == "known_paper_typo").count();
    assert_eq!(typos, 2);
}

#[test]
fn reproduce_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let sectors = dir.path().join("sectors.csv");
    let altered = pdei_core::labor::Dataset::builtin_sector_csv().replace("29.2", "45.0");
    std::fs::write(&sectors, altered).unwrap();
    let o = pdei(&["reproduce", "--table", "3", "--sectors", sectors.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("MISMATCH"));
    assert!(stderr(&o).contains("table 3"));
}

#[test]
fn validation_errors_exit_1() {
    let o = pdei(&["rank", "--dataset", "bls-2022-mgmt", "--sector", "S9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown sector S9"));
    assert!(o.stdout.is_empty());

    for args in [
        vec!["rank", "--bogus"],
        vec!["rank", "--scenario", "both"],
        vec!["select", "--scheme", "pdei", "--k", "17"],
        vec!["rank", "--candidates", "/nonexistent/pool.json"],
        vec!["rank", "--dataset", "nope"],
        vec!["reproduce", "--table", "8"],
        vec!["audit"],
    ] {
        let o = pdei(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(pdei(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_candidate_file_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pool.json");
    std::fs::write(&path, r#"[{"id":"a","race_group":"R1","gender_group":"G1","scores":[-1]}]"#).unwrap();
    let o = pdei(&["rank", "--candidates", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nonnegative"), "{}", stderr(&o));

    std::fs::write(&path, r#"[{"id":"a","race_group":"R1","gender":"G1","scores":[1]}]"#).unwrap();
    let o = pdei(&["rank", "--candidates", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[0]"), "{}", stderr(&o));
}

#[test]
fn rank_select_audit_round() {
    let o = pdei(&["rank", "--sector", "S1", "--scenario", "race"]);
    let resp: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(resp["ranking"][0]["candidate_id"], "R4/C1");
    assert_eq!(resp["ranking"][0]["pdei"], 1.0);

    let o = pdei(&["select", "--sector", "S1", "--scheme", "equal", "--k", "4"]);
    let sel: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(sel["selected"], serde_json::json!(["R4/C1", "R2/C1", "R3/C1", "R1/C1"]));

    let o = pdei(&["audit", "--selected", "R4/C1,R2/C1,R3/C1,R1/C1"]);
    let audit: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(audit["passes"], true);

    let o = pdei(&["audit", "--scheme", "pdei", "--k", "4"]);
    let audit: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(audit["passes"], false);
}

#[test]
fn rank_csv_and_plot() {
    let o = pdei(&["rank", "--sector", "S5", "--scenario", "race_gender", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 33);
    for line in text.lines().filter(|l| l.contains("&G2/C1")) {
        assert!(line.ends_with(",1.000000"), "{line}");
    }

    let o = pdei(&["plot", "--kind", "pdei_scatter", "--sector", "S1"]);
    let points: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(points.as_array().unwrap().len(), 16);
    let o = pdei(&["plot"]);
    let points: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(points.as_array().unwrap().len(), 28);
}

#[test]
fn busy_port_exits_1() {
    let held = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = held.local_addr().unwrap().port().to_string();
    let o = pdei(&["serve", "--port", &port]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot serve"));
}
