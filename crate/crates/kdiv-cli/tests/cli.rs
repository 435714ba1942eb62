use std::process::Command;

use kdiv::{divisibility, execute, Recipe};
use kdiv_cli::{run_command, CSV_HEADER, EXIT_INVALID, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String) {
    let out = run_command(args);
    (out.code, out.output)
}

#[test]
fn barlow_table() {
    let (code, text) = run(&["tables", "--which", "barlow"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<i64>> = text
        .lines()
        .filter_map(|l| l.split_whitespace().map(str::parse).collect::<Result<Vec<i64>, _>>().ok())
        .filter(|r| r.len() == 9)
        .collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0], [3, 2, 4, 10, 42, 18, 5, 9, -22]);
    assert_eq!(rows[5], [5, 3, 6, 28, 117, 75, 16, 31, -53]);
    assert_eq!(run(&["tables", "--which", "barlow"]).1, text);
}

#[test]
fn both_tables() {
    let (code, text) = run(&["tables"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("   6    6    6     35    480    432     76    151   -176"));
    assert_eq!(text, run(&["tables", "--which", "both"]).1);
}

#[test]
fn qset_output() {
    assert_eq!(run(&["qset", "45", "45,15,9,5"]), (EXIT_OK, "45 15 9 5 3 1\n".to_string()));
    assert_eq!(run(&["qset", "6", "6,3"]).0, EXIT_USAGE);
}

#[test]
fn construct_prints_certificate() {
    let (code, text) = run(&["construct", "homotopy_elliptic", "4", "2"]);
    assert_eq!(code, EXIT_OK);
    for line in ["chi_h: 4", "c1_sq: 0", "divisibility: lower=2 upper=2 certified=true", "VALID"] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn construct_rejects_bad_parameters() {
    assert_eq!(run(&["construct", "homotopy_elliptic", "3", "2"]).0, EXIT_USAGE);
    assert_eq!(run(&["construct", "homotopy_elliptic", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["construct", "no_such_thing", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
}

#[test]
fn construct_other_constructors() {
    let cases: &[&[&str]] = &[
        &["construct", "spin_surface", "2", "3", "1"],
        &["construct", "nonspin_surface", "5", "3", "2"],
        &["construct", "negative_c1", "2", "3"],
        &["construct", "elliptic_surface", "2", "6", "1"],
        &["construct", "singular_double_cover", "4", "4"],
        &["construct", "persson_cover", "2", "3", "4", "4"],
        &["construct", "pluricanonical_cover", "barlow", "2", "3"],
        &["construct", "catalog", "godeaux_like", "3", "1"],
        &["construct", "inequivalent_family", "45", "45,15,9,5", "c1sq_zero", "7", "5"],
        &["construct", "inequivalent_family", "6", "6,2", "spin_positive", "3", "1", "1"],
    ];
    for args in cases {
        let (code, text) = run(args);
        assert_eq!(code, EXIT_OK, "{args:?}\n{text}");
    }
}

#[test]
fn recipe_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let p = path.to_str().unwrap();
    let (code, built) = run(&["construct", "spin_surface", "4", "2", "1", "--recipe-out", p]);
    assert_eq!(code, EXIT_OK);
    let (code, verified) = run(&["verify", p]);
    assert_eq!(code, EXIT_OK, "{verified}");
    let body = |t: &str| t.lines().filter(|l| !l.starts_with("recipe written")).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&built), body(&verified));

    let tampered = std::fs::read_to_string(&path).unwrap().replacen("\"t\": 1", "\"t\": 2", 1);
    std::fs::write(&path, tampered).unwrap();
    assert_eq!(run(&["verify", p]).0, EXIT_INVALID);

    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["verify", p]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", dir.path().join("missing").to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn scan_rows_reproduce() {
    for (regime, ranges) in [
        ("homotopy_elliptic", "n=1..6,d=1..6"),
        ("spin_surface", "d=2..6,m=1..3,t=1..2"),
        ("nonspin_surface", "d=1..5,n=1..3,t=1..2"),
        ("negative_c1", "n=1..3,r=1..3"),
        ("singular_double_cover", "n=1..4,m=1..4"),
    ] {
        let (code, csv) = run(&["scan", "--regime", regime, "--ranges", ranges]);
        assert_eq!(code, EXIT_OK, "{csv}");
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let mut rows = 0;
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[0], regime);
            let recipe = cols[1].split(';').fold(Recipe::new(regime), |r, kv| {
                let (k, v) = kv.split_once('=').unwrap();
                r.int(k, v.parse().unwrap())
            });
            let x = execute(&recipe).unwrap();
            let inv = x.derived().unwrap();
            let cert = divisibility(&x).unwrap();
            let expected = [
                inv.chi_h.to_string(),
                inv.c1_sq.to_string(),
                x.e.to_string(),
                x.sigma.to_string(),
                x.spin.to_string(),
                cert.lower.to_string(),
                cert.certified.to_string(),
            ];
            assert_eq!(cols[2..], expected, "{line}");
            rows += 1;
        }
        assert!(rows > 0, "{regime}");
    }
}

#[test]
fn scan_writes_file_and_rejects_bad_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let args = ["scan", "--regime", "homotopy_elliptic", "--ranges", "n=2,d=1..3"];
    let (_, direct) = run(&args);
    let (code, _) = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);

    for ranges in ["n=1..3", "n=1..3,d=1..3,q=1", "n=3..1,d=1", "n=a..b,d=1"] {
        assert_eq!(run(&["scan", "--regime", "homotopy_elliptic", "--ranges", ranges]).0, EXIT_USAGE, "{ranges}");
    }
    assert_eq!(run(&["scan", "--regime", "nope", "--ranges", "n=1"]).0, EXIT_USAGE);
    assert_eq!(run(&["scan", "--regime", "negative_c1", "--ranges", "n=1..1000,r=1..1000"]).0, EXIT_USAGE);
}

#[test]
fn phi_both_directions() {
    assert_eq!(run(&["phi", "--m", "2", "--d", "3", "11", "1"]), (EXIT_OK, "42 18\n".to_string()));
    assert_eq!(run(&["phi", "--m", "2", "--d", "4", "10", "2"]), (EXIT_OK, "104 64\n".to_string()));
    assert_eq!(run(&["phi", "--m", "2", "--d", "3", "--inverse", "42", "18"]), (EXIT_OK, "11 1\n".to_string()));
    assert_eq!(run(&["phi", "--m", "2", "--d", "3", "--inverse", "43", "18"]), (EXIT_OK, "23/2 1\n".to_string()));
    assert_eq!(run(&["phi", "--m", "2", "--d", "3", "-5", "1"]), (EXIT_OK, "10 18\n".to_string()));
    assert_eq!(run(&["phi", "--m", "3", "--d", "4", "1", "1"]).0, EXIT_USAGE);
}

#[test]
fn realize_queries() {
    let (code, text) = run(&["realize", "7", "8", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("realized: spin_surface d=2;m=3;t=1"), "{text}");
    let (code, text) = run(&["realize", "3", "0", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("obstructed:"), "{text}");
    assert_eq!(run(&["realize", "5", "-9", "3"]), (EXIT_OK, "unknown\n".to_string()));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_kdiv");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["qset", "45", "45,15,9,5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), "45 15 9 5 3 1\n");
    let bad = status(&["construct", "homotopy_elliptic", "3", "2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
    assert_eq!(status(&["--help"]).status.code(), Some(0));
}
