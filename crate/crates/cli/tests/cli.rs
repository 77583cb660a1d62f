use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mixnorm_core::ensemble::{bump_ensemble, BumpSpec};
use mixnorm_core::mixed_grid::io::{write_grid_function, DataFormat};
use mixnorm_core::{AnisotropyVector, Grid};
use serde_json::Value;
use tempfile::TempDir;

fn mixnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn with_config(dir: &TempDir, body: &str, args: &[&str]) -> Output {
    let cfg = write_config(dir, "run.toml", body);
    let mut all = vec!["--config", cfg.to_str().unwrap()];
    all.extend_from_slice(args);
    mixnorm(&all)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn audit_of<'a>(v: &'a Value, geometry: &str) -> &'a Value {
    v["result"]["audits"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["l2"]["geometry"] == geometry)
        .unwrap()
}

const PLANE: &str = "a = [1, 2]\np = [2, 1.5]\ns = 0\nalpha = 1\nN = 3\n\
    [grid]\ndims = [32, 32]\nextents = [12, 12]\n[ensemble]\ncount = 6\n[experiment]\nrefinements = 1\n";

#[test]
fn default_invariants_pass() {
    let out = mixnorm(&["check-invariants"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "pass");
    let names: Vec<&str> = v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for n in ["scaling", "holder", "hausdorff_young", "partition_residual", "chain", "maximal_oracles"] {
        assert!(names.contains(&n), "{names:?}");
    }
}

#[test]
fn inadmissible_t_is_a_named_failure() {
    let dir = TempDir::new().unwrap();
    let out = with_config(&dir, "t = [2.5]\n", &["check-invariants"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    let hy = v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "hausdorff_young")
        .unwrap();
    assert_eq!(hy["status"], "fail");
    assert!(hy["detail"].as_str().unwrap().contains("not admissible"));
}

#[test]
fn corrupted_descriptor_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.desc"), "format: binary\ndims: 8 x\n").unwrap();
    let out = with_config(&dir, "[grid]\ndescriptor = \"bad.desc\"\n", &["check-invariants"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("descriptor"));
    let desc = dir.path().join("bad.desc");
    assert_eq!(mixnorm(&["norm", "--input", desc.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_and_usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(with_config(&dir, "bogus = 1\n", &["norm"]).status.code(), Some(2));
    assert_eq!(with_config(&dir, "a = [1, 2]\np = [2]\n", &["norm"]).status.code(), Some(2));
    assert_eq!(with_config(&dir, "N = 4\n", &["experiment"]).status.code(), Some(2));
    assert_eq!(mixnorm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mixnorm(&["--format", "xml", "norm"]).status.code(), Some(2));
    assert_eq!(mixnorm(&["--config", "/nonexistent/run.toml", "norm"]).status.code(), Some(2));
    assert_eq!(mixnorm(&["audit", "--symbol", "xi1 +"]).status.code(), Some(2));
    assert_eq!(with_config(&dir, "t = [1, 2]\na = [1, 1]\n", &["audit"]).status.code(), Some(2));
}

#[test]
fn constant_symbol_audit() {
    let out = mixnorm(&["audit", "--symbol", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let c = audit_of(&v, "annular")["l2"]["constant"].as_f64().unwrap();
    assert!((c / 3f64.sqrt() - 1.0).abs() < 0.01, "{c}");
    let lit = audit_of(&v, "literal");
    assert_eq!(lit["l2"]["constant"], lit["lmixed"]["constant"]);
    assert_eq!(v["result"]["threshold"], 2);
}

#[test]
fn bracket_squared_is_certified() {
    let dir = TempDir::new().unwrap();
    let out = with_config(&dir, "alpha = 2\n", &["audit", "--symbol", "bracket(xi)^2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    for g in ["literal", "annular", "construction"] {
        assert!(audit_of(&v, g)["linf"]["constant"].as_f64().unwrap().is_finite());
    }
    assert_eq!(v["result"]["label"], "theorem-certified");
    // Below the threshold the gate falls back.
    let out = with_config(&dir, "alpha = 2\nN = 1\n", &["audit", "--symbol", "bracket(xi)^2"]);
    assert_eq!(json(&out)["result"]["label"], "exploratory");
}

#[test]
fn singular_symbol_names_xi() {
    let out = mixnorm(&["audit", "--symbol", "1/xi1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("xi = [0"), "{}", stderr(&out));
}

#[test]
fn identity_experiment_ratios_are_one() {
    let dir = TempDir::new().unwrap();
    let out = with_config(&dir, "[ensemble]\ncount = 8\n[experiment]\nrefinements = 1\n", &["experiment"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    for run in v["result"]["runs"].as_array().unwrap() {
        for dir in ["forward", "inverse"] {
            for m in run[dir]["members"].as_array().unwrap() {
                assert!((m["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{m}");
            }
        }
    }
}

#[test]
fn lifting_equivalence_is_two_sided() {
    let dir = TempDir::new().unwrap();
    let out = with_config(&dir, PLANE, &["experiment"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let table = v["result"]["resolution_stability"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 2);
    for row in table {
        let (sup, inf) = (row["sup"].as_f64().unwrap(), row["inf"].as_f64().unwrap());
        assert!(sup.is_finite() && inf > 0.0, "{row}");
    }
    for run in v["result"]["runs"].as_array().unwrap() {
        assert_eq!(run["inverse"]["members"].as_array().unwrap().len(), 6);
    }
}

#[test]
fn sobolev_corollary_and_refusal() {
    let dir = TempDir::new().unwrap();
    let body = "a = [1, 1]\np = [2, 2]\ns = 1\nalpha = 1\nN = 3\nkind = \"sobolev\"\n\
        [grid]\ndims = [32, 32]\nextents = [12, 12]\n[ensemble]\ncount = 4\n[experiment]\nrefinements = 0\n";
    let out = with_config(&dir, body, &["experiment"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = &json(&out)["result"]["runs"][0];
    assert_eq!(run["forward"]["kind"], "sobolev");
    for m in run["forward"]["members"].as_array().unwrap() {
        assert!(m["ratio"].as_f64().unwrap().is_finite());
    }
    let out = with_config(&dir, &body.replace("s = 1\n", "s = 0.5\n"), &["experiment"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("refused"));
}

#[test]
fn oversized_bumps_fail_the_experiment() {
    let dir = TempDir::new().unwrap();
    let out = with_config(&dir, "[ensemble]\nwidth = 40\n", &["experiment"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ensemble generation failed"));
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.toml", PLANE);
    let run = |seed: &str, out: &Path| {
        let o = mixnorm(&[
            "experiment",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    let a = run("9", &dir.path().join("a.json"));
    let b = run("9", &dir.path().join("b.json"));
    let c = run("10", &dir.path().join("c.json"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn norm_of_a_descriptor_and_csv_output() {
    let dir = TempDir::new().unwrap();
    let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
    let grid = Grid::new(vec![64, 64], vec![12.0, 12.0]).unwrap();
    let spec = BumpSpec {
        count: 1,
        width: 1.5,
        max_dilation: 0.0,
    };
    let f = bump_ensemble(&spec, &grid, &a, None, 3).unwrap().remove(0);
    let desc = write_grid_function(&dir.path().join("f"), &f, DataFormat::Binary).unwrap();
    let cfg = write_config(&dir, "run.toml", "a = [1, 2]\np = [2, 1.5]\ns = 0.5\n");
    let args = ["norm", "--config", cfg.to_str().unwrap(), "--input", desc.to_str().unwrap()];
    let out = mixnorm(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["source"], "input");
    let norm = &v["result"]["norms"][0];
    assert_eq!(norm["kind"], "triebel_lizorkin");
    assert!(norm["value"].as_f64().unwrap() > 0.0);
    assert!(norm["tail_indicator"].is_number());
    assert_eq!(norm["params"]["s"], 0.5);

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv = String::from_utf8(mixnorm(&csv_args).stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("series,x,y"));
    assert!(lines.next().unwrap().starts_with("norm,0,"));
}
