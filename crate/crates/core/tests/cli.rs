use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

use relsw::topology::catalog;
use relsw::vortex::read_grid_binary;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn relsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relsw")).args(args).output().expect("binary runs")
}

fn run_ok(cmd: &str, input: &Path, extra: &[&str]) -> Value {
    let mut args = vec![cmd, "--input", input.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = relsw(&args);
    assert!(out.status.success(), "{cmd} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Exit code and the parsed error record from stderr.
fn run_err(cmd: &str, input: &Path) -> (i32, Value) {
    let out = relsw(&[cmd, "--input", input.to_str().unwrap()]);
    let record: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error record");
    (out.status.code().unwrap(), record)
}

#[test]
fn e2_report_has_vanishing_dimensions() {
    let r = run_ok("report", &fixture("e2_report.json"), &[]);
    let dims = r["dimensions"].as_array().unwrap();
    assert_eq!(dims.len(), 1);
    assert_eq!(dims[0]["d_main"], 0);
    assert_eq!(dims[0]["d_adapted"], 0);
    assert_eq!(dims[0]["degree_along_sigma"], "0");
    assert_eq!(dims[0]["route_check"], true);
    assert_eq!(r["pair"]["sigma_self"], 0);
    assert_eq!(r["compactness_certificate"], false);
    // Σ·Σ = 0: reducible starts are rejected, other strata have codimension 2k.
    for s in r["strata"].as_array().unwrap() {
        if s["starts_at_reducible"] == true {
            assert!(s["codimension"].is_null());
        } else {
            assert_eq!(s["codimension"].as_i64().unwrap(), 2 * s["k"].as_i64().unwrap());
        }
    }
}

#[test]
fn malformed_gram_matrix_is_a_schema_error() {
    let (code, rec) = run_err("report", &fixture("bad_gram.json"));
    assert_eq!(code, 2);
    assert_eq!(rec["exit_code"], 2);
    assert!(rec["message"].as_str().unwrap().contains("not symmetric"));
}

#[test]
fn non_characteristic_class_is_a_precondition_error() {
    let (code, rec) = run_err("dims", &fixture("noncharacteristic.json"));
    assert_eq!(code, 3);
    assert!(rec["message"].as_str().unwrap().contains("non-characteristic input"));
}

#[test]
fn missing_input_and_unknown_fields_exit_2() {
    let (code, rec) = run_err("report", Path::new("/nonexistent/spec.json"));
    assert_eq!((code, rec["kind"].as_str().unwrap()), (2, "io"));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, r#"{"manifold": {"catalog": "E(1)"}, "colour": 3}"#).unwrap();
    assert_eq!(run_err("report", &p).0, 2);
    fs::write(&p, r#"{"manifold": {"catalog": "E(99)"}}"#).unwrap();
    assert_eq!(run_err("report", &p).0, 2);
}

#[test]
fn vortex_degree_one_writes_grids_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let m = run_ok("vortex", &fixture("vortex_d1.json"), &["--out", out.to_str().unwrap()]);
    let names: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["input.normalized.json", "phi_modulus.grid", "summary.csv", "u_field.grid", "vortex.json"]
    );
    for a in m["artifacts"].as_array().unwrap() {
        let bytes = fs::read(out.join(a["name"].as_str().unwrap())).unwrap();
        assert_eq!(a["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
        assert_eq!(a["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }

    let report: Value = serde_json::from_slice(&fs::read(out.join("vortex.json")).unwrap()).unwrap();
    let flux = report["curvature_over_2pi"].as_f64().unwrap();
    assert!((flux.abs() - 1.0).abs() < 1e-6, "curvature/2pi = {flux}");
    assert_eq!(report["zero_count"], 1);

    let (header, values) = read_grid_binary(std::io::BufReader::new(fs::File::open(out.join("phi_modulus.grid")).unwrap())).unwrap();
    assert_eq!((header.n, header.field.as_str()), (64, "phi_modulus"));
    assert_eq!(values.len(), 64 * 64);
    assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));

    let csv = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn grid_flag_overrides_spec() {
    let r = run_ok("vortex", &fixture("vortex_d1.json"), &["--grid", "32", "--tolerance", "1e-9"]);
    assert_eq!(r["N"], 32);
    assert!(r["residual_sup"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn vortex_below_bradlow_bound_exits_3() {
    let (code, rec) = run_err("vortex", &fixture("vortex_bradlow.json"));
    assert_eq!(code, 3);
    assert!(rec["message"].as_str().unwrap().contains("solvability bound"));
}

#[test]
fn repeated_vortex_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        run_ok("vortex", &fixture("vortex_d1.json"), &["--seed", "7", "--grid", "32", "--out", d.to_str().unwrap()]);
    }
    for name in ["summary.csv", "manifest.json", "u_field.grid"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn normalized_input_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["single_side1.csv", "single_side2.csv"] {
        fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let first = dir.path().join("first");
    run_ok("sum", &fixture("sum_single.json"), &["--out", first.to_str().unwrap()]);
    // Table paths resolve against the spec file's directory.
    let copy = dir.path().join("normalized.json");
    fs::copy(first.join("input.normalized.json"), &copy).unwrap();
    let second = dir.path().join("second");
    run_ok("sum", &copy, &["--out", second.to_str().unwrap()]);
    for name in ["input.normalized.json", "sum.json", "splittings.csv", "sum_terms.csv"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn zero_tables_give_zero() {
    let r = run_ok("sum", &fixture("sum_zero.json"), &[]);
    assert_eq!(r["rhs"]["value"], 0);
}

#[test]
fn single_splitting_gives_the_product() {
    let r = run_ok("sum", &fixture("sum_single.json"), &[]);
    assert_eq!(r["splittings"].as_array().unwrap().len(), 1);
    assert_eq!(r["rhs"]["value"], 2 * 3);
}

#[test]
fn missing_table_entries_exit_3() {
    let (code, rec) = run_err("sum", &fixture("sum_missing.json"));
    assert_eq!(code, 3);
    assert!(rec["message"].as_str().unwrap().contains("(1, -1, empty)"));
}

#[test]
fn reducible_defect_is_one_from_the_cli() {
    let r = run_ok("sum", &fixture("sum_reducible.json"), &[]);
    let defects: Vec<i64> = r["reducible"].as_array().unwrap().iter().map(|x| x["defect"].as_i64().unwrap()).collect();
    assert_eq!(defects, [1, 1]);
}

fn elliptic_block(n: i64, ks: &[i64]) -> Value {
    let e = catalog::lookup(&format!("E({n})")).unwrap();
    let spinc: Vec<Value> =
        ks.iter().map(|&k| serde_json::json!({ "twisting_vector": e.fiber.scaled(k).coordinates() })).collect();
    serde_json::json!({ "manifold": { "catalog": format!("E({n})") }, "spinc": spinc })
}

#[test]
fn elliptic_fiber_sums_are_additive() {
    let dir = tempfile::tempdir().unwrap();
    let ks = [0, 1, 2];
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        let mut spec = elliptic_block(a, &ks);
        let glued: Vec<Value> = (0..ks.len())
            .map(|i| {
                serde_json::json!({
                    "splitting": [0, 0],
                    "spinc": [i, i],
                    "euler": 12 * (a + b),
                    "signature": -8 * (a + b),
                    "c1_square": 0,
                })
            })
            .collect();
        spec["sum"] = serde_json::json!({ "pair2": elliptic_block(b, &ks), "glued": glued });
        let p = dir.path().join(format!("e{a}_e{b}.json"));
        fs::write(&p, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
        let r = run_ok("sum", &p, &[]);
        assert_eq!(r["all_additive"], true, "E({a})#E({b})");
        for entry in r["additivity"].as_array().unwrap() {
            assert_eq!((entry["glued_dimension"].as_i64(), entry["adapted1"].as_i64()), (Some(0), Some(0)));
        }
    }
}

#[test]
fn specflow_fixture_agrees_and_matches_closed_form() {
    let r = run_ok("specflow", &fixture("specflow.json"), &["--seed", "5", "--depth", "3"]);
    assert_eq!(r["path"]["agree"], true);
    assert_eq!(r["path"]["brute_force"]["flow"], -1);
    assert_eq!(r["oracle"]["all_agree"], true);
    assert_eq!(r["oracle"]["seed"], 5);
    // g = 3, d± = 1, ℓ > 0: x = 3 + 1 − 1 = 3, dim₋Q = 3.
    assert_eq!(r["closed_form"]["minus_sf"], 6);
}

#[test]
fn report_artifacts_are_lf_csv() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("report", &fixture("e2_report.json"), &["--out", dir.path().to_str().unwrap()]);
    for name in ["dims.csv", "components.csv", "csd_ordering.csv", "strata.csv", "perturbed_counts.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(!text.contains('\r'), "{name}");
        assert!(text.ends_with('\n'), "{name}");
    }
    let dims = fs::read_to_string(dir.path().join("dims.csv")).unwrap();
    assert!(dims.starts_with("spinc,m,degree_along_sigma,d_main,d_adapted"));
}
