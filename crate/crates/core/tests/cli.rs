//! The `amd` binary driven as a subprocess.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const CUBE: &str = "3 8\n1 -1 1 -1 1 -1 1 -1\n1 1 -1 -1 1 1 -1 -1\n1 1 1 1 -1 -1 -1 -1\n";
const NO_AMD: &str = "3 4\n-1 2 -1 0\n-1 -1 1 0\n-1 -1 -1 1\n";
const HEXAGON_PYRAMID: &str = "3 7\n1 1 0 -1 -1 0 0\n0 1 1 0 -1 -1 0\n1 1 1 1 1 1 -1\n";
const NOT_REFLEXIVE: &str = "3 4\n1 0 0 -2\n0 1 0 -2\n0 0 1 -2\n";

fn amd(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_amd"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn batch(input: &Path, output: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "batch",
        "--format",
        "batch-json",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--limit",
        "50",
    ];
    args.extend_from_slice(extra);
    amd(&args, "")
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_owned).collect()
}

#[test]
fn check_prints_edge_table() {
    let o = amd(&["check"], CUBE);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("reflexive: yes"));
    assert!(out.contains("vertices: 8  facets: 6  edges: 12"));
    let rows: Vec<&str> = out.lines().filter(|l| l.ends_with("  2  1  yes")).collect();
    assert_eq!(rows.len(), 12);
}

#[test]
fn check_json_lists_edges() {
    let o = amd(&["check", "--json"], CUBE);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 12);
    assert!(edges
        .iter()
        .all(|e| e["length"] == 2 && e["colength"] == 1 && e["dull"] == true));
}

#[test]
fn amd_counts() {
    assert_eq!(stdout(&amd(&["amd", "--count"], NO_AMD)).trim(), "0");
    assert_eq!(stdout(&amd(&["amd", "--count"], CUBE)).trim(), "4096");
    assert_eq!(stdout(&amd(&["amd", "--count", "--dedup"], CUBE)).trim(), "1");
    assert_eq!(stdout(&amd(&["amd", "--count", "--limit", "10"], CUBE)).trim(), "10");
    let json = r#"{"id":"s","vertices":[[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]]}"#;
    assert_eq!(stdout(&amd(&["amd", "--count", "--format", "json"], json)).trim(), "1");
}

#[test]
fn decomps_on_hexagon_facet() {
    let out = stdout(&amd(&["decomps"], HEXAGON_PYRAMID));
    let hexagon: Vec<&str> = out.lines().filter(|l| l.ends_with("decompositions: 2")).collect();
    assert_eq!(hexagon.len(), 1);
    assert_eq!(out.lines().filter(|l| l.ends_with("decompositions: 1")).count(), 6);
}

#[test]
fn exit_codes() {
    let o = amd(&["amd"], NOT_REFLEXIVE);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not reflexive"));
    assert_eq!(amd(&["check"], "3 2\n1 2\n").status.code(), Some(1));
    assert_eq!(amd(&["check"], "").status.code(), Some(1));
    assert_eq!(amd(&["check", "--jobs", "0"], CUBE).status.code(), Some(1));
}

#[test]
fn single_commands_are_deterministic() {
    for cmd in [
        &["invariants", "--json"][..],
        &["period", "--json", "--period-order", "8"],
        &["subdivs"],
    ] {
        let a = amd(cmd, HEXAGON_PYRAMID);
        let b = amd(cmd, HEXAGON_PYRAMID);
        assert_eq!(a.status.code(), Some(0), "{cmd:?}");
        assert_eq!(a.stdout, b.stdout, "{cmd:?}");
    }
}

#[test]
fn batch_is_reproducible_and_parallel_safe() {
    let dir = tempfile::tempdir().unwrap();
    let input = common::suite_path("suite20.json");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(batch(&input, &a, &[]).status.code(), Some(0));
    assert_eq!(batch(&input, &b, &[]).status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(batch(&input, &c, &["--jobs", "4"]).status.code(), Some(0));
    let set = |p: &Path| lines(p).into_iter().collect::<BTreeSet<_>>();
    assert_eq!(set(&a), set(&c));
    assert_eq!(lines(&a).len(), 20);
}

#[test]
fn batch_resumes_after_torn_writes() {
    let dir = tempfile::tempdir().unwrap();
    let input = common::suite_path("suite20.json");
    let full = dir.path().join("full");
    assert_eq!(batch(&input, &full, &[]).status.code(), Some(0));
    let records = lines(&full);

    // Simulate an interruption: seven complete records with ledger entries,
    // an eighth record without one, a torn ninth record and a torn ledger id.
    let part = dir.path().join("part");
    let ids: Vec<String> = records
        .iter()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["id"]
                .as_str()
                .unwrap()
                .to_owned()
        })
        .collect();
    let mut out: String = records[..8].iter().map(|l| format!("{l}\n")).collect();
    out.push_str(&records[8][..records[8].len() / 2]);
    fs::write(&part, out).unwrap();
    let mut ledger: String = ids[..7].iter().map(|id| format!("{id}\n")).collect();
    ledger.push_str(&ids[9][..ids[9].len() - 1]);
    fs::write(amd_core::cli::ledger_path(&part), ledger).unwrap();

    assert_eq!(batch(&input, &part, &["--resume"]).status.code(), Some(0));
    assert_eq!(
        lines(&part).into_iter().collect::<BTreeSet<_>>(),
        records.into_iter().collect()
    );
    assert_eq!(lines(&amd_core::cli::ledger_path(&part)).len(), 20);
}

#[test]
fn batch_reports_bad_records_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    fs::write(
        &input,
        r#"[{"id":"ok","vertices":[[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]]},
            {"id":"bad","vertices":[[1,0,0],[0,1,0],[0,0,1],[-2,-2,-2]]}]"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    // Per-item input errors are recorded; the run itself succeeds.
    let o = batch(&input, &out, &[]);
    assert_eq!(o.status.code(), Some(0));
    let recs: Vec<serde_json::Value> = lines(&out).iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["status"], "ok");
    assert_eq!(recs[0]["amd_count"], 1);
    assert_ne!(recs[1]["status"], "ok");
    assert!(recs[1]["error"]["message"].is_string());
}
