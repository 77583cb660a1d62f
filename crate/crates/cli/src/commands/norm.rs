//! `norm`: the configured smoothness norm and the plain mixed Lebesgue norm
//! of the input function, or of each ensemble member.

use serde::Serialize;
use serde_json::json;

use mixnorm_core::mixed_grid::mixed_norm;
use mixnorm_core::spaces::{sobolev_orders, space_norm, SpaceKind, SpaceParams, TAIL_THRESHOLD};
use mixnorm_core::Region;

use super::{ensemble, family, physical_input};
use crate::config::Setup;
use crate::report::{Outcome, Row};
use crate::CliError;

#[derive(Debug, Serialize)]
struct Entry {
    index: usize,
    kind: SpaceKind,
    params: SpaceParams,
    value: f64,
    tail_indicator: f64,
    truncation_flag: bool,
    lebesgue: f64,
}

pub fn run(setup: &Setup) -> Result<Outcome, CliError> {
    let cfg = &setup.config;
    if cfg.kind == SpaceKind::Sobolev {
        sobolev_orders(cfg.s, &setup.a).map_err(|e| CliError::usage(format!("W-comparison refused: {e}")))?;
    }
    let (source, funcs) = match physical_input(setup)? {
        Some(f) => ("input", vec![f]),
        None => ("ensemble", ensemble(setup)?),
    };
    let prm = SpaceParams::new(cfg.kind, cfg.s, setup.p.clone(), cfg.q, setup.a.clone())?;
    let fam = family(setup, &setup.grid)?;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (index, f) in funcs.iter().enumerate() {
        let rep = space_norm(f, &prm, Some(&fam))?;
        let lebesgue = mixed_norm(f, &setup.p, &Region::Full)?;
        rows.push(Row::new("norm", index as f64, rep.value));
        rows.push(Row::new("tail_indicator", index as f64, rep.tail_indicator));
        entries.push(Entry {
            index,
            kind: rep.kind,
            params: prm.clone(),
            value: rep.value,
            tail_indicator: rep.tail_indicator,
            truncation_flag: rep.truncation_flag,
            lebesgue,
        });
    }
    let passed = entries.iter().all(|e| e.value.is_finite());
    Ok(Outcome {
        passed,
        result: json!({
            "source": source,
            "levels": fam.levels(),
            "tail_threshold": TAIL_THRESHOLD,
            "flagged": entries.iter().filter(|e| e.truncation_flag).count(),
            "norms": entries,
        }),
        rows,
    })
}
