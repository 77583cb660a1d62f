//! The invariant suite behind `check-invariants`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use mixnorm_core::littlewood_paley::{covered_count, partition_residual, LPFamily};
use mixnorm_core::maximal::{directional_max_with, fiber_max_brute, fiber_max_fast, iterated_max_values, MaxAlgorithm};
use mixnorm_core::mixed_grid::{dft_forward, hausdorff_young_check, holder_check, normalized_region_norm, rect_shell};
use mixnorm_core::{aniso_dilate, aniso_norm, AnisotropyVector, ExponentVector, GridFunction, Space};

use super::{ensemble, physical_input};
use crate::config::Setup;
use crate::report::{Outcome, Row};
use crate::CliError;

const SCALING_TOL: f64 = 1e-9;
const HOLDER_SLACK: f64 = 1e-12;
const HY_BOUND: f64 = 1.01;
const PARTITION_TOL: f64 = 1e-12;
const CHAIN_SLACK: f64 = 1e-9;
/// Deepest shell examined by the chain check.
const CHAIN_LEVELS: usize = 4;
const FIBER_MAX_LEN: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    status: Status,
    value: Option<f64>,
    bound: Option<f64>,
    detail: String,
}

impl Check {
    fn measured(name: &'static str, value: f64, bound: f64, detail: String) -> Self {
        Self {
            name,
            status: if value <= bound { Status::Pass } else { Status::Fail },
            value: Some(value),
            bound: Some(bound),
            detail,
        }
    }

    fn failed(name: &'static str, detail: String) -> Self {
        Self {
            name,
            status: Status::Fail,
            value: None,
            bound: None,
            detail,
        }
    }
}

type CheckResult = Result<Check, mixnorm_core::Error>;

pub fn run(setup: &Setup) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(setup.config.seed);
    let mut funcs = Vec::new();
    let mut checks = Vec::new();
    match ensemble(setup) {
        Ok(e) => funcs = e,
        Err(e) => checks.push(Check::failed("ensemble", e.message)),
    }
    if let Some(f) = physical_input(setup)? {
        funcs.push(f);
    }
    let named: [(&'static str, CheckResult); 6] = [
        ("scaling", scaling(&setup.a, setup.config.invariants.samples, &mut rng)),
        ("holder", holder(setup, &mut rng)),
        ("hausdorff_young", hausdorff_young(&funcs, &setup.t)),
        ("partition_residual", partition(setup)),
        ("chain", chain(&funcs, setup)),
        ("maximal_oracles", maximal(&funcs, &setup.r, setup.config.invariants.pairs, &mut rng)),
    ];
    for (name, res) in named {
        checks.push(res.unwrap_or_else(|e| Check::failed(name, e.to_string())));
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    let rows = checks
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.value.map(|v| Row::new(c.name, i as f64, v)))
        .collect();
    Ok(Outcome {
        passed,
        result: json!({ "checks": checks }),
        rows,
    })
}

fn scaling(a: &AnisotropyVector, samples: usize, rng: &mut ChaCha8Rng) -> CheckResult {
    let n = a.dim();
    let iso = AnisotropyVector::isotropic(n);
    let (mut worst, mut degen): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let x: Vec<f64> = (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
        let lambda = rng.gen_range(-8.0f64..8.0).exp2();
        let base = aniso_norm(&x, a, 1e-12)?;
        if base == 0.0 {
            continue;
        }
        let lhs = aniso_norm(&aniso_dilate(lambda, a, &x)?, a, 1e-12)?;
        worst = worst.max((lhs - lambda * base).abs() / (lambda * base));
        let e = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        degen = degen.max((aniso_norm(&x, &iso, 1e-12)? - e).abs() / e);
    }
    Ok(Check::measured(
        "scaling",
        worst.max(degen),
        SCALING_TOL,
        format!("{samples} samples: dilation error {worst:.2e}, Euclidean degeneration {degen:.2e}"),
    ))
}

fn random_function(setup: &Setup, rng: &mut ChaCha8Rng) -> GridFunction {
    let values = (0..setup.grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::new(setup.grid.clone(), Space::Physical, values).expect("length matches the grid")
}

fn holder(setup: &Setup, rng: &mut ChaCha8Rng) -> CheckResult {
    if setup.p.entries().iter().any(|p| *p < 1.0) {
        return Ok(Check {
            name: "holder",
            status: Status::Skipped,
            value: None,
            bound: None,
            detail: format!("p = {:?} has entries below 1", setup.p.entries()),
        });
    }
    let pairs = setup.config.invariants.pairs;
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let f = random_function(setup, rng);
        let g = random_function(setup, rng);
        worst = worst.max(holder_check(&f, &g, &setup.p)?.ratio);
    }
    Ok(Check::measured(
        "holder",
        worst,
        1.0 + HOLDER_SLACK,
        format!("{pairs} random pairs at p = {:?}", setup.p.entries()),
    ))
}

fn hausdorff_young(funcs: &[GridFunction], t: &ExponentVector) -> CheckResult {
    if !t.is_admissible() {
        return Ok(Check::failed(
            "hausdorff_young",
            format!("t = {:?} is not admissible: need 1 <= t_n <= ... <= t_1 <= 2", t.entries()),
        ));
    }
    let mut worst: f64 = 0.0;
    for f in funcs {
        worst = worst.max(hausdorff_young_check(f, t)?.normalized);
    }
    Ok(Check::measured(
        "hausdorff_young",
        worst,
        HY_BOUND,
        format!("{} functions at t = {:?}", funcs.len(), t.entries()),
    ))
}

fn partition(setup: &Setup) -> CheckResult {
    let levels = match setup.config.levels {
        Some(j) => j,
        None => LPFamily::max_resolved_level(&setup.a, &setup.grid)
            .ok_or_else(|| mixnorm_core::Error::Domain("the grid resolves no Littlewood-Paley level".into()))?,
    };
    let fam = LPFamily::build(&setup.a, levels, &setup.grid)?;
    let covered = covered_count(&fam);
    if covered == 0 {
        return Ok(Check::failed("partition_residual", "no covered frequencies".into()));
    }
    Ok(Check::measured(
        "partition_residual",
        partition_residual(&fam),
        PARTITION_TOL,
        format!("J = {levels}, {covered} covered frequencies"),
    ))
}

/// Normalized shell norms of `f^` along `1 <= t <= (t + 2)/2 <= 2`; `t` is
/// replaced by `3/2` when not admissible.
fn chain(funcs: &[GridFunction], setup: &Setup) -> CheckResult {
    let n = setup.a.dim();
    let mid: Vec<f64> = if setup.t.is_admissible() {
        setup.t.entries().to_vec()
    } else {
        vec![1.5; n]
    };
    let upper: Vec<f64> = mid.iter().map(|t| 0.5 * (t + 2.0)).collect();
    let exps = [vec![1.0; n], mid, upper, vec![2.0; n]]
        .into_iter()
        .map(ExponentVector::new)
        .collect::<Result<Vec<_>, _>>()?;
    let top = LPFamily::max_resolved_level(&setup.a, &setup.grid).map_or(0, |j| j.min(CHAIN_LEVELS));
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    for f in funcs {
        let fh = dft_forward(f)?;
        for j in 0..=top {
            let region = rect_shell(j as i32, &setup.a);
            let v = exps
                .iter()
                .map(|e| normalized_region_norm(&fh, e, &region))
                .collect::<Result<Vec<_>, _>>()?;
            evaluated += 1;
            for w in v.windows(2) {
                worst = worst.max((w[0] - w[1]) / w[1].max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(Check::measured(
        "chain",
        worst,
        CHAIN_SLACK,
        format!("{evaluated} shell evaluations on levels 0..={top}"),
    ))
}

fn maximal(funcs: &[GridFunction], r: &ExponentVector, fibers: usize, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut mismatches = 0usize;
    for _ in 0..fibers {
        let len = rng.gen_range(1..=FIBER_MAX_LEN);
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let v: Vec<f64> = (0..len).map(|_| scale * rng.gen_range(0.0..1.0)).collect();
        if fiber_max_fast(&v) != fiber_max_brute(&v) {
            mismatches += 1;
        }
    }
    let mut grids = 0usize;
    for f in funcs {
        for axis in 0..f.ndim() {
            let fast = directional_max_with(f, axis, MaxAlgorithm::Fast)?;
            let brute = directional_max_with(f, axis, MaxAlgorithm::Brute)?;
            grids += 1;
            if fast != brute {
                mismatches += 1;
            }
        }
        if iterated_max_values(f, r, MaxAlgorithm::Fast)? != iterated_max_values(f, r, MaxAlgorithm::Brute)? {
            mismatches += 1;
        }
    }
    Ok(Check::measured(
        "maximal_oracles",
        mismatches as f64,
        0.0,
        format!(
            "fast vs brute force on {fibers} random fibers, {grids} directional and {} iterated maxima (r = {:?})",
            funcs.len(),
            r.entries()
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    #[test]
    fn defaults_pass() {
        let out = run(&Config::default().resolve().unwrap()).unwrap();
        assert!(out.passed, "{:#}", out.result);
    }

    #[test]
    fn inadmissible_t_fails_by_name() {
        let cfg = Config {
            t: Some(vec![3.0]),
            ..Config::default()
        };
        let out = run(&cfg.resolve().unwrap()).unwrap();
        assert!(!out.passed);
        let checks = out.result["checks"].as_array().unwrap();
        let hy = checks.iter().find(|c| c["name"] == "hausdorff_young").unwrap();
        assert_eq!(hy["status"], "fail");
        assert!(hy["detail"].as_str().unwrap().contains("not admissible"));
    }
}
