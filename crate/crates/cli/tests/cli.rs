use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn cstarcat(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_cstarcat"))
        .args(args)
        .env_remove("CSTARCAT_SEED")
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn k0_of_scalars() {
    let (out, _, code) = cstarcat(&["k0", &path("scalar.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "K0 = Z^1, [1] -> (1); K1 = 0 (finite-dimensional)");
}

#[test]
fn scalar_spec_validates() {
    let (out, _, code) = cstarcat(&["validate", &path("scalar.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all checks passed"));
}

#[test]
fn non_star_closed_spec_names_the_pair() {
    let (_, err, code) = cstarcat(&["validate", &path("not_star_closed.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("involution closure"), "{err}");
    assert!(err.contains("(a -> b)"), "{err}");
}

#[test]
fn parse_errors_exit_with_input_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("scalar.json")).unwrap();
    std::fs::write(&bad, text.replacen("\"dim\": 1", "\"dim\": -1", 1)).unwrap();
    let (_, err, code) = cstarcat(&["k0", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("category.objects[0].dim"), "{err}");
    let (_, _, code) = cstarcat(&["k0", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn orbit_table_for_trivial_z2() {
    let (out, _, code) = cstarcat(&["orbit", &path("scalar_z2.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("G/e: Z^1"));
    assert!(out.contains("G/G: Z^2"));
    // induction from the trivial subgroup hits both characters once
    assert!(out.contains("G/e -> G/G via [0, 0]: [[1], [1]]"), "{out}");

    let (json, _, _) = cstarcat(&["--format", "json", "orbit", &path("scalar_z2.json")]);
    let v: Value = serde_json::from_str(&json).unwrap();
    let ind = v["result"]["morphisms"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["from"] == "G/e" && m["to"] == "G/G")
        .unwrap();
    assert_eq!(ind["matrix"], serde_json::json!([[1], [1]]));
}

#[test]
fn crossed_by_trivial_subgroup_is_k0() {
    let (k0, _, _) = cstarcat(&["k0", &path("scalar_z2.json")]);
    for sub in ["{e}", "0", "e"] {
        let (out, _, code) = cstarcat(&["crossed", &path("scalar_z2.json"), "--subgroup", sub]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().nth(1), k0.lines().next(), "{sub}");
    }
    let (out, _, code) = cstarcat(&["crossed", &path("scalar_z2.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("K0 = Z^2, [1] -> (1, 1)"), "{out}");
    let (_, err, code) = cstarcat(&["crossed", &path("scalar_z2.json"), "--subgroup", "7"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn corner_inclusion_is_morita() {
    let (out, _, code) = cstarcat(&["morita", &path("scalar.json"), "--functor", &path("corner_functor.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("Morita equivalence: yes"));
    assert!(out.contains("K0 map: [[1]]"));
}

#[test]
fn sums_check_passes_and_restates_tolerances() {
    let (json, _, code) = cstarcat(&[
        "sums-check",
        &path("s3_points.json"),
        "--trials",
        "5",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "{json}");
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["seed"], 9);
    for r in v["reports"].as_array().unwrap() {
        for c in r["checks"].as_array().unwrap() {
            assert!(c["tolerance"].is_number());
            assert!(c["residual"].is_number());
        }
    }
}

#[test]
fn seed_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cstarcat"))
        .args(["--format", "json", "k0", &path("scalar.json")])
        .env("CSTARCAT_SEED", "41")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 41);
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["--format", "json", "--seed", "5", "sums-check", &path("s3_points.json"), "--trials", "4"];
    let (a, _, _) = cstarcat(&args);
    let (b, _, _) = cstarcat(&args);
    assert_eq!(a, b);
}

#[test]
fn golden_files_round_trip() {
    for name in ["s3_points.json", "scalar.json", "scalar_z2.json", "not_star_closed.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let (out, _, code) = cstarcat(&["fmt", &path(name)]);
        assert_eq!(code, 0);
        assert_eq!(out, text, "{name}");
    }
}

#[test]
fn s3_example_validates() {
    let (out, _, code) = cstarcat(&["validate", &path("s3_points.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("group of order 6"));
}
