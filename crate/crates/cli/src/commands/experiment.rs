//! `experiment`: boundedness ratios over a seeded ensemble, repeated on
//! successively refined grids.

use serde::Serialize;
use serde_json::json;

use mixnorm_core::multipliers::{boundedness_experiment, theorem_gate, BoundednessReport, MultiplierSpec};
use mixnorm_core::spaces::{sobolev_orders, SpaceKind, SpaceParams};
use mixnorm_core::Grid;

use super::audit::{gate_audit, level_rows};
use super::{bumps, family, multiplier, sample};
use crate::config::Setup;
use crate::report::{Outcome, Row};
use crate::CliError;

#[derive(Debug, Serialize)]
struct Run {
    dims: Vec<usize>,
    levels: usize,
    forward: BoundednessReport,
    inverse: Option<BoundednessReport>,
}

#[derive(Debug, Serialize)]
struct Stability {
    dims: Vec<usize>,
    sup: f64,
    inf: f64,
    /// `max(sup, 1/inf)` over both directions.
    c: f64,
    flagged: usize,
}

/// Smallest `C` with every ratio in `[1/C, C]`.
fn two_sided(r: &BoundednessReport) -> f64 {
    r.sup.max(1.0 / r.inf)
}

fn all_finite(r: &BoundednessReport) -> bool {
    r.members.iter().all(|m| m.ratio.is_some_and(f64::is_finite))
}

fn gated(m: &MultiplierSpec, setup: &Setup) -> Result<mixnorm_core::multipliers::TheoremGate, CliError> {
    let audit = gate_audit(m, setup)?;
    let cfg = &setup.config;
    Ok(theorem_gate(m, &setup.p, cfg.q, cfg.kind, &setup.t, Some(&audit.lmixed)))
}

pub fn run(setup: &Setup) -> Result<Outcome, CliError> {
    let cfg = &setup.config;
    let lifting = cfg.experiment.symbol.trim() == "lifting";
    if cfg.kind == SpaceKind::Sobolev {
        for s in [cfg.s, cfg.s + cfg.alpha] {
            sobolev_orders(s, &setup.a)
                .map_err(|e| CliError::usage(format!("W-comparison refused at s = {s}: {e}")))?;
        }
    }
    let forward = multiplier(&cfg.experiment.symbol, cfg.alpha, setup)?;
    let inverse = if lifting && cfg.experiment.inverse {
        Some(multiplier("lifting", -cfg.alpha, setup)?)
    } else {
        None
    };
    let forward_audit = gate_audit(&forward, setup)?;
    let forward_gate = theorem_gate(&forward, &setup.p, cfg.q, cfg.kind, &setup.t, Some(&forward_audit.lmixed));
    let inverse_gate = inverse.as_ref().map(|m| gated(m, setup)).transpose()?;

    let target = SpaceParams::new(cfg.kind, cfg.s, setup.p.clone(), cfg.q, setup.a.clone())?;
    let lifted = target.at_smoothness(cfg.s + cfg.alpha);
    let bumps = bumps(setup)?;
    let mut runs = Vec::new();
    let mut table = Vec::new();
    let mut rows = Vec::new();
    for level in 0..=cfg.experiment.refinements {
        let dims: Vec<usize> = setup.grid.dims().iter().map(|d| d << level).collect();
        let grid = Grid::new(dims.clone(), setup.grid.extents().to_vec())?;
        let ens = sample(&bumps, &grid, setup)?;
        let fam = family(setup, &grid)?;
        let fwd = boundedness_experiment(&forward, &target, &fam, &ens, forward_gate.clone())?;
        let inv = match (&inverse, &inverse_gate) {
            (Some(m), Some(g)) => Some(boundedness_experiment(m, &lifted, &fam, &ens, g.clone())?),
            _ => None,
        };
        let tag = dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x");
        for (name, rep) in std::iter::once(("forward", &fwd)).chain(inv.as_ref().map(|r| ("inverse", r))) {
            for m in &rep.members {
                rows.push(Row::new(format!("ratio_{name}_{tag}"), m.index as f64, m.ratio.unwrap_or(f64::NAN)));
            }
        }
        let reports: Vec<&BoundednessReport> = std::iter::once(&fwd).chain(inv.as_ref()).collect();
        let stab = Stability {
            dims: dims.clone(),
            sup: reports.iter().map(|r| r.sup).fold(0.0, f64::max),
            inf: reports.iter().map(|r| r.inf).fold(f64::INFINITY, f64::min),
            c: reports.iter().map(|r| two_sided(r)).fold(0.0, f64::max),
            flagged: reports
                .iter()
                .flat_map(|r| &r.members)
                .filter(|m| m.truncation_flag)
                .count(),
        };
        rows.push(Row::new("resolution_c", level as f64, stab.c));
        table.push(stab);
        runs.push(Run {
            dims,
            levels: fam.levels(),
            forward: fwd,
            inverse: inv,
        });
    }
    for r in [&forward_audit.linf, &forward_audit.l2, &forward_audit.lmixed] {
        rows.extend(level_rows(&format!("localized_{}", r.mode.as_str()), r));
    }
    let cs: Vec<f64> = table.iter().map(|s| s.c).collect();
    let spread = cs.iter().copied().fold(0.0, f64::max) / cs.iter().copied().fold(f64::INFINITY, f64::min);
    let passed = runs
        .iter()
        .all(|r| all_finite(&r.forward) && r.inverse.as_ref().is_none_or(all_finite));
    Ok(Outcome {
        passed,
        result: json!({
            "symbol": forward.name(),
            "kind": cfg.kind,
            "s": cfg.s,
            "alpha": cfg.alpha,
            "ensemble": {
                "count": setup.bumps.count,
                "width": setup.bumps.width,
                "max_dilation": setup.bumps.max_dilation,
                "cutoff": cfg.ensemble.cutoff,
                "bumps": bumps,
            },
            "gate": forward_gate,
            "label": forward_gate.label(),
            "audit": forward_audit,
            "runs": runs,
            "resolution_stability": { "table": table, "c_spread": spread },
        }),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    #[test]
    fn identity_ratios_are_one() {
        let mut cfg = Config::default();
        cfg.ensemble.count = 5;
        cfg.experiment.refinements = 0;
        let out = run(&cfg.resolve().unwrap()).unwrap();
        assert!(out.passed);
        for r in out.rows.iter().filter(|r| r.series.starts_with("ratio_")) {
            assert!((r.y - 1.0).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn sobolev_needs_integer_orders() {
        let cfg = Config {
            kind: SpaceKind::Sobolev,
            s: 0.5,
            ..Config::default()
        };
        assert_eq!(run(&cfg.resolve().unwrap()).unwrap_err().code, 2);
    }
}
