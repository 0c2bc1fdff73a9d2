use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conetop::cli::{CommandResult, Report, SCHEMA};
use conetop::witness::{Certificate, ChainBound};
use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn conetop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conetop"))
        .args(args)
        .env_remove("CONETOP_CORPUS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(o: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap()
}

#[test]
fn profile_report_round_trips() {
    let o = conetop(&["profile", corpus("z-nat.inst").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r.schema, SCHEMA);
    assert_eq!(r.profiles.len(), 2);
    assert!(r.violations.is_empty());
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);

    let raw: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cone = &raw["profiles"][0];
    assert_eq!(cone["variant"], "cone");
    assert_eq!(cone["verdicts"]["T0"]["holds"], true);
    assert_eq!(cone["verdicts"]["T1"]["holds"], false);
}

#[test]
fn batch_keeps_filename_order() {
    let dir = corpus("");
    let o = conetop(&["profile", "--all", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> = report(&o)
        .reports
        .iter()
        .map(|r| r.instance.as_ref().unwrap().name.clone())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.len() >= 20);
}

#[test]
fn corpus_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_conetop"))
        .args(["--format", "text", "profile", "--all"])
        .env("CONETOP_CORPUS", corpus(""))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("instance lex-2"));

    let o = conetop(&["profile", "--all"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn membership() {
    let o = conetop(&[
        "member",
        corpus("z-numerical-3-5.inst").to_str().unwrap(),
        "--element",
        "[7]",
        "--element",
        "[8]",
        "--element",
        "[-3]",
    ]);
    assert_eq!(code(&o), 0);
    let Some(CommandResult::Membership { results }) = report(&o).result else {
        panic!("membership result expected");
    };
    let got: Vec<bool> = results.iter().map(|m| m.member).collect();
    // 8 = 3 + 5; 7 is a gap of <3,5>.
    assert_eq!(got, [false, true, false]);
}

#[test]
fn holding_property_has_no_certificate() {
    let o = conetop(&[
        "certify",
        corpus("z-nat.inst").to_str().unwrap(),
        "--property",
        "pseudocompact",
        "--space",
        "cone-star",
        "--verify",
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    let entry = &r.certificates[0];
    assert_eq!(entry.holds, Some(true));
    assert!(entry.certificate.is_none());
    assert!(entry.verification.is_none());
}

#[test]
fn mutated_certificate_fails_verification() {
    let inst = corpus("z-nat.inst");
    let o = conetop(&[
        "certify",
        inst.to_str().unwrap(),
        "--property",
        "2pc",
        "--space",
        "cone-star",
        "--verify",
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    let entry = &r.certificates[0];
    assert_eq!(entry.holds, Some(false));
    assert!(entry.verification.as_ref().unwrap().passed);

    // The stored report verifies as is.
    let saved = scratch("z-nat-2pc.json", &r.to_json());
    let again = conetop(&[
        "certify",
        inst.to_str().unwrap(),
        "--property",
        "2pc",
        "--space",
        "cone-star",
        "--verify-file",
        saved.to_str().unwrap(),
    ]);
    assert_eq!(code(&again), 0);

    // Flip the functional: it is then negative on the step.
    let Some(Certificate::OpenChain {
        step,
        bound: ChainBound::Functional { mut phi },
    }) = entry.certificate.clone()
    else {
        panic!("functional chain expected");
    };
    for w in &mut phi.weights {
        *w = -w.clone();
    }
    let bad = Certificate::OpenChain {
        step,
        bound: ChainBound::Functional { phi },
    };
    let bad_file = scratch("z-nat-2pc-bad.json", &serde_json::to_string(&bad).unwrap());
    let o = conetop(&[
        "certify",
        inst.to_str().unwrap(),
        "--property",
        "2pc",
        "--space",
        "cone-star",
        "--verify-file",
        bad_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(report(&o).has_failed_verification());
}

#[test]
fn input_errors_exit_2() {
    let bad = scratch("bad-torsion.inst", "group.rank = 1\ngroup.torsion = [1]\nmonoid.generators = [[1, 0]]\n");
    let o = conetop(&["profile", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("torsion entries must be >= 2"), "{err}");

    let arity = scratch("bad-arity.inst", "group.rank = 2\nmonoid.generators = [[1]]\n");
    let o = conetop(&["profile", arity.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    // Unknown subcommand and missing file.
    assert_eq!(code(&conetop(&["frobnicate"])), 2);
    assert_eq!(code(&conetop(&["profile", "/nonexistent/x.inst"])), 2);

    // P_SPACE is only characterized for the cone* topology.
    let o = conetop(&["certify", corpus("z-nat.inst").to_str().unwrap(), "--property", "p-space"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn closure_and_limits() {
    let nat = corpus("z-nat.inst");
    let o = conetop(&["--format", "text", "closure", nat.to_str().unwrap(), "--set", "[2]"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("closure: (2)-S"));

    let o = conetop(&["limits", nat.to_str().unwrap(), "--rule", "[0]:[1]"]);
    assert_eq!(code(&o), 0);
    assert!(matches!(report(&o).result, Some(CommandResult::Limits { .. })));
}

#[test]
fn window_check_passes_on_corpus_sample() {
    let files = ["z-nat.inst", "z2-half-cone.inst", "lex-2.inst", "z2z2-finite.inst"];
    let mut args = vec!["window-check".to_string()];
    args.extend(files.iter().map(|f| corpus(f).to_string_lossy().into_owned()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = conetop(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o).reports.len(), files.len());
}

#[test]
fn fintop_commands() {
    let o = conetop(&["fintop", "enumerate", "--points", "3"]);
    assert_eq!(code(&o), 0);
    let Some(CommandResult::Enumerate { count, .. }) = report(&o).result else {
        panic!("enumerate result expected");
    };
    assert_eq!(count, 29);

    let o = conetop(&["fintop", "verify-lemmas", "--points", "2"]);
    assert_eq!(code(&o), 0);

    assert_eq!(code(&conetop(&["fintop", "enumerate", "--points", "9"])), 2);
}
