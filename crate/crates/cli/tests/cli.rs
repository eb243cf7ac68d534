use std::process::{Command, Output};

fn bochner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bochner")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn every_command_passes_with_defaults() {
    for args in [
        &["isometry"][..],
        &["comb"],
        &["cantor", "--size", "8"],
        &["gp", "--paths", "2000"],
        &["abelian", "--n", "8", "--cases", "10"],
        &["catalog", "list"],
    ] {
        let out = bochner(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["catalog_version"], "1.0", "{args:?}");
        if args[0] != "catalog" {
            assert_eq!(v["pass"], true);
            assert_eq!(v["seed"], 1);
            assert!(v["tolerances"].is_object());
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = bochner(&["gp", "--paths", "500", "--seed", seed, "--out", p]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a", "9"), run("b", "9"));
    assert_ne!(run("c", "9"), run("d", "10"));
}

#[test]
fn configuration_errors_exit_one() {
    for args in [
        &["isometry", "--pair", "nope"][..],
        &["isometry", "--phi", "triangle"],
        &["isometry", "--tol", "-1"],
        &["isometry", "--tol", "nan"],
        &["isometry", "--pair", "lebesgue"],
        &["comb", "--bogus"],
        &["cantor", "--size", "0"],
        &[],
    ] {
        let out = bochner(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn impossible_tolerance_exits_two() {
    for args in [&["isometry", "--tol", "0"][..], &["comb", "--tol", "0"], &["abelian", "--tol", "0"]] {
        let out = bochner(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(json(&out)["pass"], false);
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bochner(&["--help"]).status.code(), Some(0));
    assert_eq!(bochner(&["--version"]).status.code(), Some(0));
}

#[test]
fn pair_and_phi_selection() {
    let out = bochner(&["isometry", "--pair", "exp,cos", "--phi", "gaussian"]);
    let v = json(&out);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    let out = bochner(&["isometry", "--phi", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["records"].as_array().unwrap().is_empty());
}

#[test]
fn csv_output() {
    let out = bochner(&["abelian", "--n", "4", "--cases", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let width = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == width));

    let out = bochner(&["gp", "--paths", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    let out = bochner(&["gp", "--paths", "0", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn reports_separate_tolerances_from_parameters() {
    let v = json(&bochner(&["abelian", "--n", "5", "--cases", "2"]));
    assert_eq!(v["parameters"]["n"], 5);
    assert_eq!(v["parameters"]["cases"], 2);
    assert_eq!(v["tolerances"]["rel_err"], 1e-12);
    assert!(v["tolerances"].get("n").is_none());
}
