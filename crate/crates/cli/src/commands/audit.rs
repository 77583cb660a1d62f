//! `audit`: multiplier conditions on every configured shell geometry, the
//! smoothness threshold and the theorem gate.

use serde_json::json;

use mixnorm_core::multipliers::{
    audit_all, smoothness_threshold, theorem_gate, AuditOptions, ConditionReport, FullAudit, MultiplierSpec,
};

use super::multiplier;
use crate::config::Setup;
use crate::report::{Outcome, Row};
use crate::CliError;

pub fn options(setup: &Setup) -> AuditOptions {
    AuditOptions {
        cells: setup.config.audit.cells,
        refine: setup.config.audit.refine,
    }
}

/// Per-level maxima of a report's localized values.
pub fn level_rows(series: &str, r: &ConditionReport) -> Vec<Row> {
    (0..=r.j_audit)
        .map(|j| {
            let v = r
                .values
                .iter()
                .filter(|v| v.j == j)
                .map(|v| v.value)
                .fold(0.0, f64::max);
            Row::new(series, j as f64, v)
        })
        .collect()
}

/// All three audits on the gate geometry.
pub fn gate_audit(m: &MultiplierSpec, setup: &Setup) -> Result<FullAudit, CliError> {
    Ok(audit_all(
        m,
        &setup.t,
        &setup.a,
        setup.config.j_audit,
        setup.config.audit.gate_geometry,
        &options(setup),
    )?)
}

pub fn run(setup: &Setup) -> Result<Outcome, CliError> {
    let cfg = &setup.config;
    let m = multiplier(&cfg.audit.symbol, cfg.alpha, setup)?;
    let mut audits = Vec::new();
    let mut rows = Vec::new();
    for &g in &cfg.audit.geometries {
        let full = audit_all(&m, &setup.t, &setup.a, cfg.j_audit, g, &options(setup))?;
        for r in [&full.linf, &full.l2, &full.lmixed] {
            rows.extend(level_rows(&format!("{}_{}", g.as_str(), r.mode.as_str()), r));
        }
        audits.push(full);
    }
    let gate_full = match audits.iter().find(|f| f.lmixed.geometry == cfg.audit.gate_geometry) {
        Some(f) => f.clone(),
        None => gate_audit(&m, setup)?,
    };
    let gate = theorem_gate(&m, &setup.p, cfg.q, cfg.kind, &setup.t, Some(&gate_full.lmixed));
    let threshold = smoothness_threshold(&setup.p, cfg.q, &setup.t, cfg.kind).map_err(|e| e.to_string());
    let passed = audits
        .iter()
        .chain(std::iter::once(&gate_full))
        .all(|f| [&f.linf, &f.l2, &f.lmixed].iter().all(|r| r.constant.is_finite()));
    Ok(Outcome {
        passed,
        result: json!({
            "symbol": m.name(),
            "alpha": m.alpha(),
            "budget": m.budget(),
            "j_audit": cfg.j_audit,
            "audited_levels": format!("0..={}", cfg.j_audit),
            "audits": audits,
            "threshold": threshold.as_ref().ok(),
            "threshold_error": threshold.as_ref().err(),
            "gate_geometry": cfg.audit.gate_geometry,
            "gate": gate,
            "label": gate.label(),
        }),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    #[test]
    fn constant_symbol_on_the_annulus() {
        let out = run(&Config::default().resolve().unwrap()).unwrap();
        assert!(out.passed);
        let annular = out.result["audits"]
            .as_array()
            .unwrap()
            .iter()
            .find(|f| f["l2"]["geometry"] == "annular")
            .unwrap();
        let c = annular["l2"]["constant"].as_f64().unwrap();
        assert!((c - 3f64.sqrt()).abs() < 0.01 * 3f64.sqrt(), "{c}");
    }
}
