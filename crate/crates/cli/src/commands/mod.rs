pub mod audit;
pub mod experiment;
pub mod invariants;
pub mod norm;

use mixnorm_core::ensemble::{generate_bumps, sample_bump, Bump};
use mixnorm_core::littlewood_paley::LPFamily;
use mixnorm_core::mixed_grid::dft_inverse;
use mixnorm_core::multipliers::{lifting_multiplier, DerivativeMode, MultiplierSpec, FD_MAX_ORDER};
use mixnorm_core::{Grid, GridFunction, Space};

use crate::config::Setup;
use crate::CliError;

/// Bump parameters drawn from the configured seed.
pub fn bumps(setup: &Setup) -> Result<Vec<Bump>, CliError> {
    generate_bumps(&setup.bumps, &setup.a, setup.grid.extents(), setup.config.seed)
        .map_err(|e| CliError::failure(format!("ensemble generation failed: {e}")))
}

pub fn sample(bumps: &[Bump], grid: &Grid, setup: &Setup) -> Result<Vec<GridFunction>, CliError> {
    bumps
        .iter()
        .map(|b| sample_bump(b, grid, &setup.a, setup.config.ensemble.cutoff))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::failure(format!("ensemble generation failed: {e}")))
}

/// The configured ensemble on the configured grid.
pub fn ensemble(setup: &Setup) -> Result<Vec<GridFunction>, CliError> {
    sample(&bumps(setup)?, &setup.grid, setup)
}

/// The descriptor's function in physical space.
pub fn physical_input(setup: &Setup) -> Result<Option<GridFunction>, CliError> {
    match &setup.input {
        Some(f) if f.space() == Space::Frequency => Ok(Some(dft_inverse(f)?)),
        other => Ok(other.clone()),
    }
}

/// Truncated family of depth `J`, by default deep enough to cover the grid.
pub fn family(setup: &Setup, grid: &Grid) -> Result<LPFamily, CliError> {
    let levels = setup
        .config
        .levels
        .unwrap_or_else(|| LPFamily::covering_level(&setup.a, grid));
    Ok(LPFamily::build_truncated(&setup.a, levels, grid)?)
}

/// `lifting` names `<xi>_a^alpha`; anything else is parsed as an expression.
/// Audits need an admissible `t` and derivatives up to order `N`.
pub fn multiplier(src: &str, alpha: f64, setup: &Setup) -> Result<MultiplierSpec, CliError> {
    let budget = setup.config.budget;
    let m = if src.trim() == "lifting" {
        lifting_multiplier(alpha, &setup.a)
            .with_budget(budget)
            .map_err(|e| CliError::usage(format!("N = {budget}: {e}")))?
    } else {
        MultiplierSpec::from_expression(src, &setup.a, alpha, budget)
            .map_err(|e| CliError::usage(format!("symbol `{src}`: {e}")))?
    };
    if matches!(m.mode(), DerivativeMode::FiniteDifference { .. }) && budget > FD_MAX_ORDER {
        return Err(CliError::usage(format!(
            "N = {budget} exceeds the finite-difference order limit {FD_MAX_ORDER}"
        )));
    }
    if !setup.t.is_admissible() {
        return Err(CliError::usage(format!(
            "t = {:?} is not admissible for multiplier audits",
            setup.t.entries()
        )));
    }
    Ok(m)
}
