use std::process::{Command, Stdio};

use psl3_cli::oracle::OracleReport;
use psl3_cli::search::SearchReport;
use psl3_cli::{run_from, EXIT_INCONSISTENT, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use psl3_core::verify::VerificationReport;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_from(std::iter::once("psl3").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn reports(json: &str) -> Vec<VerificationReport> {
    json.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn verify_emits_one_json_object_per_instance() {
    let (code, out, _) = run(&["verify", "--family", "THM1,DIH_2", "--q", "7,5", "--no-timings"]);
    assert_eq!(code, EXIT_OK);
    let rs = reports(&out);
    let keys: Vec<_> = rs.iter().map(|r| (r.family.to_string(), r.q)).collect();
    assert_eq!(keys, [("THM1".into(), 5), ("THM1".into(), 7), ("DIH_2".into(), 5), ("DIH_2".into(), 7)]);
    assert!(rs.iter().all(|r| r.timings_ms.is_none() && r.expectations_met));
}

#[test]
fn negative_and_field_parameters() {
    let (code, out, err) =
        run(&["verify", "--family", "THM2", "--q", "7", "--k", "-1", "--i", "2", "--format", "text"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("schlafli [3, 6, 3, 3]"));
    let (code, out, _) = run(&["verify", "--family", "r4-odd", "--q", "19", "--a", "(-1+X)/4", "--a-prime", "(-1+X)/4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(reports(&out)[0].schlafli, vec![5, 3, 5]);
}

#[test]
fn csv_has_header_and_rows() {
    let (code, out, _) = run(&["verify", "--family", "R3_ODD_CASE2,R3_ODD_CASE3", "--q", "5", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("family,q,"));
    assert!(lines[1].starts_with("R3_ODD_CASE2,5,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "--family", "NOPE", "--q", "5"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--family", "THM1", "--q", "6"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--family", "THM1", "--q", "4"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--family", "THM1"]).0, EXIT_USAGE);
    assert_eq!(run(&["search", "--q", "5", "--rank", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["search", "--q", "2", "--rank", "7"]).0, EXIT_USAGE);
    assert_eq!(run(&["oracle", "--family", "THM1", "--q", "7", "--cap", "1000"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn exit_code_constants_are_distinct() {
    let codes = [EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INCONSISTENT];
    assert_eq!(codes, [0, 1, 2, 3]);
}

#[test]
fn serial_and_parallel_output_match() {
    let args = ["verify", "--family", "THM1,R3_CONIC,R4_ODD", "--q", "5,7,11", "--no-timings"];
    let serial = run(&[&args[..], &["--jobs", "1"]].concat());
    let parallel = run(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(serial, parallel);
    let s1 = run(&["search", "--q", "2", "--rank", "3,4", "--jobs", "1"]);
    let s4 = run(&["search", "--q", "2", "--rank", "3,4", "--jobs", "4"]);
    assert_eq!(s1, s4);
}

#[test]
fn search_over_gf2_finds_no_chiral_tuples() {
    let (code, out, _) = run(&["search", "--q", "2", "--rank", "3,4"]);
    assert_eq!(code, EXIT_OK);
    for line in out.lines() {
        let r: SearchReport = serde_json::from_str(line).unwrap();
        assert_eq!(r.chiral, 0);
        assert!(r.chiral_tuples.is_empty());
    }
}

#[test]
fn witness_text_output() {
    let (code, out, _) = run(&["witness", "--parity", "even", "--q", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(0,1,0) fixed by all 6 elements"));
    let (code, out, _) = run(&["witness", "--parity", "odd", "--q", "3,5,7"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.matches("σ_1σ_5 ≠ σ_5σ_1").count(), 3);
}

#[test]
fn oracle_agrees_with_stabilizer_chains() {
    let (code, out, _) = run(&["oracle", "--family", "THM1,R3_ODD_CASE6", "--q", "5", "--samples", "40"]);
    assert_eq!(code, EXIT_OK);
    let rs: Vec<OracleReport> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rs.len(), 2);
    assert_eq!(rs[0].schlafli, vec![4, 8, 4]);
    assert!(rs.iter().all(|r| r.consistent && r.intersections.iter().all(|i| i.equals_expected)));
}

#[test]
fn binary_writes_to_out_file() {
    let dir = std::env::temp_dir().join(format!("psl3-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("thm1.jsonl");
    let status = Command::new(env!("CARGO_BIN_EXE_psl3"))
        .args(["verify", "--family", "THM1", "--q", "5", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let rs = reports(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rs[0].schlafli, vec![4, 8, 4]);
    std::fs::remove_dir_all(&dir).unwrap();
    let status =
        Command::new(env!("CARGO_BIN_EXE_psl3")).args(["verify", "--q", "5"]).stderr(Stdio::null()).status().unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
}

#[test]
fn documented_examples() {
    let (code, out, _) = run(&["verify", "--family", "THM1", "--q", "7", "--x", "3"]);
    assert_eq!(code, EXIT_OK);
    let r = &reports(&out)[0];
    assert_eq!((r.schlafli.clone(), r.group_order), (vec![6, 4, 6], Some(1876896)));
    // an expected failure still exits 0
    let (code, out, _) = run(&["verify", "--family", "R3_ODD_CASE1", "--q", "7"]);
    assert_eq!(code, EXIT_OK);
    assert!(!reports(&out)[0].is_polytope());
    let (code, out, _) = run(&["oracle", "--family", "THM1", "--q", "7", "--samples", "10"]);
    assert_eq!(code, EXIT_OK);
    let o: OracleReport = serde_json::from_str(out.trim()).unwrap();
    assert!(o.subgroups.iter().any(|s| s.subgroup == "<s2,s3>" && s.closure == 1176));
}
