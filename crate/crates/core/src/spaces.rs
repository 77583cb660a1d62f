//! Besov, Triebel-Lizorkin, Sobolev and generalized Sobolev quasi-norms of
//! sampled functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::anisotropy::{self, AnisotropyVector};
use crate::error::{domain, Error, Result};
use crate::littlewood_paley::LPFamily;
use crate::mixed_grid::{
    dft_forward, dft_inverse, mixed_norm, mixed_norm_of, multiply_frequency, ExponentVector,
    GridFunction, Region,
};

/// Tail indicators at or above this fraction of the norm flag a run.
pub const TAIL_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Besov,
    TriebelLizorkin,
    Sobolev,
    GenSobolev,
}

/// Parameters of a smoothness space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceParams {
    pub s: f64,
    pub alpha: f64,
    pub p: ExponentVector,
    pub q: f64,
    pub a: AnisotropyVector,
    pub kind: SpaceKind,
}

impl SpaceParams {
    pub fn new(kind: SpaceKind, s: f64, p: ExponentVector, q: f64, a: AnisotropyVector) -> Result<Self> {
        let prm = Self {
            s,
            alpha: 0.0,
            p,
            q,
            a,
            kind,
        };
        prm.validate()?;
        Ok(prm)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Same parameters at smoothness `s`.
    pub fn at_smoothness(&self, s: f64) -> Self {
        Self { s, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.dim() != self.a.dim() {
            return Err(Error::Shape("p and a have different dimensions".into()));
        }
        if !self.s.is_finite() || !self.alpha.is_finite() {
            return domain("smoothness and order must be finite");
        }
        if self.q.is_nan() || self.q <= 0.0 {
            return domain(format!("q must lie in (0, inf], got {}", self.q));
        }
        match self.kind {
            SpaceKind::Besov => Ok(()),
            SpaceKind::TriebelLizorkin => {
                if self.p.entries().iter().any(|p| p.is_infinite()) {
                    return domain("Triebel-Lizorkin norms need finite p entries");
                }
                Ok(())
            }
            SpaceKind::Sobolev | SpaceKind::GenSobolev => check_sobolev_p(&self.p),
        }
    }
}

fn check_sobolev_p(p: &ExponentVector) -> Result<()> {
    if let Some(bad) = p.entries().iter().find(|p| !(**p > 1.0 && p.is_finite())) {
        return domain(format!("Sobolev norms need p entries in (1, inf), got {bad}"));
    }
    Ok(())
}

/// A computed norm with its truncation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub kind: SpaceKind,
    pub value: f64,
    /// `max_{j in {J-1, J}} 2^{sj} ||phi_j * f||_p`; zero when not applicable.
    pub tail_indicator: f64,
    /// Set when the tail indicator reaches [`TAIL_THRESHOLD`] of the value.
    pub truncation_flag: bool,
}

impl NormReport {
    fn new(kind: SpaceKind, value: f64, tail_indicator: f64) -> Self {
        Self {
            kind,
            value,
            tail_indicator,
            truncation_flag: value > 0.0 && tail_indicator >= TAIL_THRESHOLD * value,
        }
    }
}

fn check_family(prm: &SpaceParams, fam: &LPFamily) -> Result<()> {
    if prm.a != *fam.anisotropy() {
        return Err(Error::Domain(
            "family anisotropy differs from the space anisotropy".into(),
        ));
    }
    if prm.q.is_nan() || prm.q <= 0.0 {
        return domain(format!("q must lie in (0, inf], got {}", prm.q));
    }
    Ok(())
}

fn tail(block_norms: &[f64]) -> f64 {
    let n = block_norms.len();
    block_norms[n.saturating_sub(2)..].iter().copied().fold(0.0, f64::max)
}

/// Weighted block norms `2^{sj} ||phi_j * f||_p` and the blocks themselves.
fn weighted_blocks(
    f: &GridFunction,
    prm: &SpaceParams,
    fam: &LPFamily,
) -> Result<(Vec<GridFunction>, Vec<f64>)> {
    let blocks = fam.blocks(f)?;
    let norms = blocks
        .iter()
        .enumerate()
        .map(|(j, b)| Ok((prm.s * j as f64).exp2() * mixed_norm(b, &prm.p, &Region::Full)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((blocks, norms))
}

/// `|| ( sum_j (2^{sj} |phi_j * f|)^q )^{1/q} ||_p`, truncated at `J`.
pub fn tl_norm(f: &GridFunction, prm: &SpaceParams, fam: &LPFamily) -> Result<NormReport> {
    check_family(prm, fam)?;
    if prm.p.entries().iter().any(|p| p.is_infinite()) {
        return domain("Triebel-Lizorkin norms need finite p entries");
    }
    let (blocks, norms) = weighted_blocks(f, prm, fam)?;
    let mut agg = vec![0.0; f.len()];
    for (j, b) in blocks.iter().enumerate() {
        let w = (prm.s * j as f64).exp2();
        for (acc, v) in agg.iter_mut().zip(b.values()) {
            let x = w * v.norm();
            if prm.q.is_infinite() {
                *acc = f64::max(*acc, x);
            } else {
                *acc += x.powf(prm.q);
            }
        }
    }
    if prm.q.is_finite() {
        for v in agg.iter_mut() {
            *v = v.powf(1.0 / prm.q);
        }
    }
    let value = mixed_norm_of(&agg, f, &prm.p)?;
    Ok(NormReport::new(SpaceKind::TriebelLizorkin, value, tail(&norms)))
}

/// `( sum_j (2^{sj} ||phi_j * f||_p)^q )^{1/q}`, supremum when `q = inf`.
pub fn besov_norm(f: &GridFunction, prm: &SpaceParams, fam: &LPFamily) -> Result<NormReport> {
    check_family(prm, fam)?;
    let (_, norms) = weighted_blocks(f, prm, fam)?;
    let value = if prm.q.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        norms.iter().map(|v| v.powf(prm.q)).sum::<f64>().powf(1.0 / prm.q)
    };
    Ok(NormReport::new(SpaceKind::Besov, value, tail(&norms)))
}

/// `d^k f / dx_axis^k` by multiplication with `(i xi_axis)^k`.
pub fn spectral_derivative(f: &GridFunction, axis: usize, order: u32) -> Result<GridFunction> {
    if axis >= f.ndim() {
        return domain(format!("axis {axis} out of range for a {}-dimensional grid", f.ndim()));
    }
    let fhat = dft_forward(f)?;
    let d = multiply_frequency(&fhat, |xi| Ok(Complex64::new(0.0, xi[axis]).powu(order)))?;
    dft_inverse(&d)
}

/// `||f||_p + sum_j ||d^{k_j} f / dx_j^{k_j}||_p`, skipping `k_j = 0` terms
/// so that order zero gives the Lebesgue norm.
pub fn sobolev_norm(f: &GridFunction, k: &[u32], p: &ExponentVector) -> Result<f64> {
    check_sobolev_p(p)?;
    if k.len() != f.ndim() {
        return Err(Error::Shape(format!(
            "{} derivative orders for a {}-dimensional grid",
            k.len(),
            f.ndim()
        )));
    }
    let mut total = mixed_norm(f, p, &Region::Full)?;
    for (axis, &order) in k.iter().enumerate() {
        if order > 0 {
            total += mixed_norm(&spectral_derivative(f, axis, order)?, p, &Region::Full)?;
        }
    }
    Ok(total)
}

/// `F^{-1}((1 + |xi|_a^2)^{s/2} f^)`.
pub fn bessel_potential(f: &GridFunction, s: f64, a: &AnisotropyVector) -> Result<GridFunction> {
    if a.dim() != f.ndim() {
        return Err(Error::Shape("anisotropy and grid dimensions differ".into()));
    }
    let fhat = dft_forward(f)?;
    let m = multiply_frequency(&fhat, |xi| {
        let r = anisotropy::aniso_norm(xi, a, anisotropy::DEFAULT_TOL)?;
        Ok(Complex64::new((1.0 + r * r).powf(s / 2.0), 0.0))
    })?;
    dft_inverse(&m)
}

/// `|| F^{-1}((1 + |xi|_a^2)^{s/2} f^) ||_p`.
pub fn gen_sobolev_norm(
    f: &GridFunction,
    s: f64,
    p: &ExponentVector,
    a: &AnisotropyVector,
) -> Result<f64> {
    check_sobolev_p(p)?;
    if s == 0.0 {
        return mixed_norm(f, p, &Region::Full);
    }
    mixed_norm(&bessel_potential(f, s, a)?, p, &Region::Full)
}

/// Orders `k_j = s / a_j` for comparing with `W^k_p`; refused unless every
/// ratio is a nonnegative integer.
pub fn sobolev_orders(s: f64, a: &AnisotropyVector) -> Result<Vec<u32>> {
    a.entries()
        .iter()
        .map(|aj| {
            let k = s / aj;
            let r = k.round();
            if k >= -1e-12 && (k - r).abs() <= 1e-9 && r <= u32::MAX as f64 {
                Ok(r.max(0.0) as u32)
            } else {
                domain(format!("s / a_j = {k} is not a nonnegative integer"))
            }
        })
        .collect()
}

/// Dispatches on `prm.kind`. `Sobolev` uses the orders `s / a_j`.
pub fn space_norm(f: &GridFunction, prm: &SpaceParams, fam: Option<&LPFamily>) -> Result<NormReport> {
    prm.validate()?;
    let need_fam = || fam.ok_or_else(|| Error::Domain("this norm needs a Littlewood-Paley family".into()));
    match prm.kind {
        SpaceKind::TriebelLizorkin => tl_norm(f, prm, need_fam()?),
        SpaceKind::Besov => besov_norm(f, prm, need_fam()?),
        SpaceKind::Sobolev => {
            let k = sobolev_orders(prm.s, &prm.a)?;
            Ok(NormReport::new(SpaceKind::Sobolev, sobolev_norm(f, &k, &prm.p)?, 0.0))
        }
        SpaceKind::GenSobolev => Ok(NormReport::new(
            SpaceKind::GenSobolev,
            gen_sobolev_norm(f, prm.s, &prm.p, &prm.a)?,
            0.0,
        )),
    }
}
