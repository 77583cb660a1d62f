//! Quantities from the boundedness argument: the localized symbol, its
//! rescaling, the weighted kernel integral and the per-multi-index terms
//! that bound it through the mixed Hausdorff-Young inequality.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::{admissible, mu_exponents, multi_indices, MultiplierSpec};
use crate::error::{domain, Error, Result};
use crate::littlewood_paley::LPFamily;
use crate::mixed_grid::{dft_forward, dft_inverse, mixed_norm, ExponentVector, Grid, GridFunction, Region, Space};
use crate::spaces::SpaceKind;

/// Physical half-width per axis, in units of `2^{M a_k}`.
const PHYSICAL_SCALE: f64 = 96.0;
/// Frequency oversampling over the support of the rescaled symbol.
const FREQUENCY_MARGIN: f64 = 1.25;
/// Largest allowed kernel magnitude in the outer tenth of the physical box,
/// relative to its maximum.
pub const KERNEL_TAIL_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaTerm {
    pub gamma: Vec<u32>,
    /// `||x^gamma F^{-1} g||_{t'}`.
    pub i_gamma: f64,
    /// `prod (2 pi)^{1/t'_k - 1} ||d^gamma g||_t`.
    pub hy_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticProfile {
    pub j: u32,
    /// `m_(j) = 2^{-j alpha} m sum_{|k-j| <= M} phi_k^` on the dilated grid.
    #[serde(skip)]
    pub m_local: GridFunction,
    /// `g_(j)(xi) = m_(j)(2^{j a} xi)`.
    #[serde(skip)]
    pub g_local: GridFunction,
    /// `int |F^{-1} g_(j)(x)| prod (1 + |x_k|)^{1/r_k} dx`.
    pub weighted_integral: f64,
    pub terms: Vec<GammaTerm>,
    /// `I / sum_gamma I_gamma`.
    pub empirical_c: f64,
    pub hausdorff_young_holds: bool,
    pub eps: f64,
    pub mu: Vec<f64>,
    pub mu_sum: f64,
    pub t_sum: f64,
    /// `N_k = 1/mu_k + 1/t_k + 2 eps`.
    pub n_k: Vec<f64>,
    /// `N = mu + t + 2 n eps`.
    pub n_total: f64,
    /// `1/r_k = 1/mu_k + eps`.
    pub inv_r: Vec<f64>,
    pub r: Vec<f64>,
    /// Kernel magnitude in the outer tenth of the box over its maximum.
    pub kernel_tail: f64,
}

/// Diagnostics of level `j`. Without `eps` the budget is split as
/// `eps = (N - mu - t) / (2n)`.
#[allow(clippy::too_many_arguments)]
pub fn localized_profile(
    m: &MultiplierSpec,
    j: u32,
    fam: &LPFamily,
    t: &ExponentVector,
    p: &ExponentVector,
    q: f64,
    kind: SpaceKind,
    eps: Option<f64>,
) -> Result<DiagnosticProfile> {
    let a = fam.anisotropy();
    let n = a.dim();
    if t.dim() != n || p.dim() != n {
        return Err(Error::Shape("t, p and the family have different dimensions".into()));
    }
    let (ok, t_sum) = admissible(t);
    if !ok {
        return domain(format!("t = {:?} is not admissible", t.entries()));
    }
    let (mu, mu_sum) = mu_exponents(p, q, kind);
    let budget = m.budget() as f64;
    let eps = match eps {
        Some(e) if e > 0.0 && e.is_finite() => {
            if mu_sum + t_sum + 2.0 * n as f64 * e > budget + 1e-12 {
                return Err(Error::Precondition(format!(
                    "mu + t + 2n eps = {} exceeds the budget N = {budget}",
                    mu_sum + t_sum + 2.0 * n as f64 * e
                )));
            }
            e
        }
        Some(e) => return domain(format!("eps must be positive, got {e}")),
        None => {
            let e = (budget - mu_sum - t_sum) / (2.0 * n as f64);
            if e <= 0.0 {
                return Err(Error::Precondition(format!(
                    "budget N = {budget} does not exceed mu + t = {}",
                    mu_sum + t_sum
                )));
            }
            e
        }
    };
    let tr = t.reciprocals();
    let n_k: Vec<f64> = mu.iter().zip(&tr).map(|(m, r)| 1.0 / m + r + 2.0 * eps).collect();
    let inv_r: Vec<f64> = mu.iter().map(|m| 1.0 / m + eps).collect();
    let r: Vec<f64> = inv_r.iter().map(|v| 1.0 / v).collect();

    let overlap = fam.overlap() as i64;
    let support = fam.profile().support;
    let spread = a.dyadic_factors(overlap as i32);
    let extents: Vec<f64> = spread.iter().map(|s| PHYSICAL_SCALE * s).collect();
    let dims: Vec<usize> = spread
        .iter()
        .zip(&extents)
        .map(|(s, l)| {
            let need = 2.0 * FREQUENCY_MARGIN * support * s * l / PI;
            let k = need.ceil() as usize;
            k + k % 2
        })
        .collect();
    let grid = Grid::new(dims.clone(), extents.clone())?;
    let up = a.dyadic_factors(j as i32);
    let weight = (-(j as f64) * m.alpha()).exp2();
    let jj = j as i64;
    let mut xi = vec![0.0; n];
    let mut idx = vec![0usize; n];
    let mut g_vals = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        grid.unravel(flat, &mut idx);
        for k in 0..n {
            xi[k] = grid.coord(Space::Frequency, k, idx[k]) * up[k];
        }
        let cut: f64 = (jj - overlap..=jj + overlap).map(|k| fam.phi_hat_level(k, &xi)).sum();
        g_vals.push(if cut == 0.0 { Complex64::new(0.0, 0.0) } else { m.eval(&xi)? * (weight * cut) });
    }
    let g_local = GridFunction::new(grid.clone(), Space::Frequency, g_vals.clone())?;
    let m_grid = Grid::new(dims, extents.iter().zip(&up).map(|(l, s)| l / s).collect())?;
    let m_local = GridFunction::new(m_grid, Space::Frequency, g_vals)?;

    let kernel = dft_inverse(&g_local)?;
    let kmax = kernel.max_abs();
    let mut tail: f64 = 0.0;
    let mut integral = 0.0;
    let mut x = vec![0.0; n];
    for (flat, v) in kernel.values().iter().enumerate() {
        grid.unravel(flat, &mut idx);
        let mut w = 1.0;
        let mut outer = false;
        for k in 0..n {
            x[k] = grid.coord(Space::Physical, k, idx[k]);
            w *= (1.0 + x[k].abs()).powf(inv_r[k]);
            outer |= x[k].abs() > 0.9 * extents[k];
        }
        integral += v.norm() * w;
        if outer {
            tail = tail.max(v.norm());
        }
    }
    integral *= grid.cell_measure(Space::Physical);
    let kernel_tail = if kmax > 0.0 { tail / kmax } else { 0.0 };
    if kernel_tail > KERNEL_TAIL_TOLERANCE {
        return Err(Error::Resolution {
            required: extents.iter().map(|l| 2.0 * l).collect(),
            available: extents.clone(),
        });
    }

    let tc = t.conjugate()?;
    let hy_factor: f64 = tc.reciprocals().iter().map(|r| (2.0 * PI).powf(r - 1.0)).product();
    let mut terms = Vec::new();
    for gamma in multi_indices(n, m.budget()) {
        let weighted = GridFunction::from_fn(grid.clone(), Space::Physical, |x| {
            let mono: f64 = x.iter().zip(&gamma).map(|(x, g)| x.powi(*g as i32)).product();
            Complex64::new(mono, 0.0)
        })
        .zip_with(&kernel, |w, k| w * k)?;
        let i_gamma = mixed_norm(&weighted, &tc, &Region::Full)?;
        let dg = dft_forward(&weighted)?;
        let hy_bound = hy_factor * mixed_norm(&dg, t, &Region::Full)?;
        terms.push(GammaTerm { gamma, i_gamma, hy_bound });
    }
    let total: f64 = terms.iter().map(|t| t.i_gamma).sum();
    let hausdorff_young_holds = terms.iter().all(|t| t.i_gamma <= t.hy_bound * (1.0 + 1e-9));
    Ok(DiagnosticProfile {
        j,
        m_local,
        g_local,
        weighted_integral: integral,
        empirical_c: if total > 0.0 { integral / total } else { 0.0 },
        terms,
        hausdorff_young_holds,
        eps,
        mu,
        mu_sum,
        t_sum,
        n_total: mu_sum + t_sum + 2.0 * n as f64 * eps,
        n_k,
        inv_r,
        r,
        kernel_tail,
    })
}
