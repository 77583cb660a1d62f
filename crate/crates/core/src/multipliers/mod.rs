//! Fourier multipliers: symbols, operator application, Hörmander-type
//! condition audits, smoothness thresholds, the lifting multiplier and
//! diagnostics of the boundedness argument.

pub mod expr;
mod profile;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::sync::Arc;

use crate::anisotropy::{self, AnisotropyVector};
use crate::error::{domain, Error, Result};
use crate::littlewood_paley::LPFamily;
use crate::mixed_grid::{
    dft_forward, dft_inverse, mixed_norm_raw, multiply_frequency, ExponentVector, GridFunction,
    Region, Space,
};
use crate::spaces::{self, SpaceKind, SpaceParams};

pub use profile::{localized_profile, DiagnosticProfile, GammaTerm};

pub type SymbolFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
/// `(gamma, xi) -> d^gamma m(xi)`, `None` when unavailable.
pub type DerivativeFn = Arc<dyn Fn(&[u32], &[f64]) -> Option<Complex64> + Send + Sync>;

/// Base finite-difference step; on level `j` axis `k` uses `2^{j a_k}` times it.
pub const FD_BASE_STEP: f64 = 1e-4;
/// Highest per-axis derivative order available by finite differences.
pub const FD_MAX_ORDER: u32 = 3;
/// Default number of audited levels beyond `j = 0`.
pub const DEFAULT_J_AUDIT: u32 = 6;

#[derive(Clone)]
pub enum DerivativeMode {
    Analytic(DerivativeFn),
    /// Central differences with base step `step`.
    FiniteDifference { step: f64 },
}

impl fmt::Debug for DerivativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivativeMode::Analytic(_) => write!(f, "Analytic"),
            DerivativeMode::FiniteDifference { step } => write!(f, "FiniteDifference({step})"),
        }
    }
}

/// A symbol `m` with its derivative source, order `alpha` and smoothness
/// budget `N`.
#[derive(Clone)]
pub struct MultiplierSpec {
    name: String,
    symbol: SymbolFn,
    mode: DerivativeMode,
    alpha: f64,
    budget: u32,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("name", &self.name)
            .field("mode", &self.mode)
            .field("alpha", &self.alpha)
            .field("budget", &self.budget)
            .finish()
    }
}

impl MultiplierSpec {
    pub fn new(name: impl Into<String>, symbol: SymbolFn, mode: DerivativeMode, alpha: f64, budget: u32) -> Result<Self> {
        if let DerivativeMode::FiniteDifference { step } = mode {
            if !(step > 0.0 && step.is_finite()) {
                return domain(format!("finite-difference step must be positive, got {step}"));
            }
        }
        if budget < 1 {
            return domain("smoothness budget N must be at least 1");
        }
        if !alpha.is_finite() {
            return domain("multiplier order must be finite");
        }
        Ok(Self {
            name: name.into(),
            symbol,
            mode,
            alpha,
            budget,
        })
    }

    /// Symbol given as an expression, differentiated numerically.
    pub fn from_expression(src: &str, a: &AnisotropyVector, alpha: f64, budget: u32) -> Result<Self> {
        let e = expr::parse(src, a.dim())?;
        let a = a.clone();
        Self::new(
            src,
            Arc::new(move |xi| e.eval(xi, &a)),
            DerivativeMode::FiniteDifference { step: FD_BASE_STEP },
            alpha,
            budget,
        )
    }

    /// `m = 1`.
    pub fn identity(budget: u32) -> Self {
        Self::new(
            "1",
            Arc::new(|_| Complex64::new(1.0, 0.0)),
            DerivativeMode::Analytic(Arc::new(|g, _| {
                Some(Complex64::new(if g.iter().all(|k| *k == 0) { 1.0 } else { 0.0 }, 0.0))
            })),
            0.0,
            budget,
        )
        .expect("valid identity")
    }

    /// `m(xi) = exp(-i xi . v)`, translation by `v`.
    pub fn modulation(v: Vec<f64>, budget: u32) -> Self {
        let w = v.clone();
        let phase = move |xi: &[f64], v: &[f64]| {
            Complex64::new(0.0, -xi.iter().zip(v).map(|(x, v)| x * v).sum::<f64>()).exp()
        };
        let p2 = phase;
        Self::new(
            format!("modulation{v:?}"),
            Arc::new(move |xi| phase(xi, &v)),
            DerivativeMode::Analytic(Arc::new(move |g, xi| {
                let mut c = p2(xi, &w);
                for (k, &o) in g.iter().enumerate() {
                    c *= Complex64::new(0.0, -w[k]).powu(o);
                }
                Some(c)
            })),
            0.0,
            budget,
        )
        .expect("valid modulation")
    }

    /// `(1 + |xi|_a^2)^{s/2}`, of order `s`.
    pub fn rational(s: f64, a: &AnisotropyVector, budget: u32) -> Result<Self> {
        let a = a.clone();
        Self::new(
            format!("(1+|xi|_a^2)^({s}/2)"),
            Arc::new(move |xi| {
                let r = anisotropy::norm_unchecked(xi, a.entries(), anisotropy::DEFAULT_TOL);
                Complex64::new((1.0 + r * r).powf(s / 2.0), 0.0)
            }),
            DerivativeMode::FiniteDifference { step: FD_BASE_STEP },
            s,
            budget,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn mode(&self) -> &DerivativeMode {
        &self.mode
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_budget(mut self, budget: u32) -> Result<Self> {
        if budget < 1 {
            return domain("smoothness budget N must be at least 1");
        }
        self.budget = budget;
        Ok(self)
    }

    /// `m(xi)`, rejecting non-finite values.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        let v = (self.symbol)(xi);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { xi: xi.to_vec() })
        }
    }

    /// `d^gamma m(xi)`; `steps` are the per-axis finite-difference steps.
    pub fn derivative(&self, gamma: &[u32], xi: &[f64], steps: &[f64]) -> Result<Complex64> {
        if gamma.iter().all(|g| *g == 0) {
            return self.eval(xi);
        }
        match &self.mode {
            DerivativeMode::Analytic(d) => {
                let v = d(gamma, xi).ok_or_else(|| {
                    Error::Domain(format!("derivative {gamma:?} unavailable for `{}`", self.name))
                })?;
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Evaluation { xi: xi.to_vec() })
                }
            }
            DerivativeMode::FiniteDifference { .. } => finite_difference(self, gamma, xi, steps),
        }
    }

    /// Per-axis finite-difference steps on level `j`.
    pub fn steps(&self, j: i32, a: &AnisotropyVector) -> Vec<f64> {
        let base = match self.mode {
            DerivativeMode::FiniteDifference { step } => step,
            DerivativeMode::Analytic(_) => FD_BASE_STEP,
        };
        a.dyadic_factors(j).iter().map(|s| s * base).collect()
    }
}

fn stencil(order: u32) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        _ => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
    }
}

fn finite_difference(m: &MultiplierSpec, gamma: &[u32], xi: &[f64], h: &[f64]) -> Result<Complex64> {
    if let Some(g) = gamma.iter().find(|g| **g > FD_MAX_ORDER) {
        return Err(Error::Domain(format!(
            "finite differences support per-axis order <= {FD_MAX_ORDER}, requested {g}"
        )));
    }
    let stencils: Vec<&[(i32, f64)]> = gamma.iter().map(|g| stencil(*g)).collect();
    let mut idx = vec![0usize; gamma.len()];
    let mut pt = xi.to_vec();
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for k in 0..gamma.len() {
            let (off, c) = stencils[k][idx[k]];
            pt[k] = xi[k] + off as f64 * h[k];
            w *= c;
        }
        acc += m.eval(&pt)? * w;
        let mut k = 0;
        loop {
            if k == gamma.len() {
                let scale: f64 = gamma.iter().zip(h).map(|(g, h)| h.powi(*g as i32)).product();
                return Ok(acc / scale);
            }
            idx[k] += 1;
            if idx[k] < stencils[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Multi-indices with `|gamma| <= order`, by total order then lexicographic.
pub fn multi_indices(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=order {
        let mut cur = vec![0u32; n];
        fill(&mut out, &mut cur, 0, total);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, k: usize, left: u32) {
    if k + 1 == cur.len() {
        cur[k] = left;
        out.push(cur.clone());
        return;
    }
    for v in (0..=left).rev() {
        cur[k] = v;
        fill(out, cur, k + 1, left - v);
    }
}

/// `F^{-1}(m f^)` for physical-space `f`.
pub fn apply_multiplier(m: &MultiplierSpec, f: &GridFunction) -> Result<GridFunction> {
    f.require_space(Space::Physical)?;
    let fhat = dft_forward(f)?;
    let g = multiply_frequency(&fhat, |xi| m.eval(xi))?;
    dft_inverse(&g)
}

/// `<xi>^alpha`, differentiated numerically.
pub fn lifting_multiplier(alpha: f64, a: &AnisotropyVector) -> MultiplierSpec {
    let b = a.clone();
    MultiplierSpec::new(
        format!("bracket(xi)^{alpha}"),
        Arc::new(move |xi| Complex64::new(anisotropy::bracket(xi, &b).powf(alpha), 0.0)),
        DerivativeMode::FiniteDifference { step: FD_BASE_STEP },
        alpha,
        3,
    )
    .expect("valid lifting multiplier")
}

/// Whether `1 <= t_n <= ... <= t_1 <= 2`, with `t = sum 1/t_k`.
pub fn admissible(t: &ExponentVector) -> (bool, f64) {
    (t.is_admissible(), t.reciprocal_sum())
}

/// `mu_j = min(p_1, ..., p_j, q)` (Besov drops `q`) and `mu = sum 1/mu_j`.
/// Sobolev kinds use the Triebel-Lizorkin rule.
pub fn mu_exponents(p: &ExponentVector, q: f64, kind: SpaceKind) -> (Vec<f64>, f64) {
    let mut bound = if kind == SpaceKind::Besov { f64::INFINITY } else { q };
    let mu: Vec<f64> = p
        .entries()
        .iter()
        .map(|pk| {
            bound = bound.min(*pk);
            bound
        })
        .collect();
    let sum = mu.iter().map(|m| 1.0 / m).sum();
    (mu, sum)
}

/// Smallest integer strictly greater than `mu + t`; sums within `1e-12`
/// of an integer count as that integer.
pub fn smoothness_threshold(p: &ExponentVector, q: f64, t: &ExponentVector, kind: SpaceKind) -> Result<u32> {
    let (ok, tsum) = admissible(t);
    if !ok {
        return domain(format!("t = {:?} is not admissible", t.entries()));
    }
    let (_, mu) = mu_exponents(p, q, kind);
    let x = mu + tsum;
    let r = x.round();
    let base = if (x - r).abs() <= 1e-12 * x.max(1.0) { r } else { x.floor() };
    Ok(base as u32 + 1)
}

/// Shell family used by the condition audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellGeometry {
    /// `R_0 = 2^a [-2,2]^n` and `R_j = 2^{j a}([-2,2]^n \ (-1/2,1/2)^n)`.
    Literal,
    /// `2^{j a}([-2,2]^n \ (-1/2,1/2)^n)` for every `j >= 0`.
    Annular,
    /// Supports of the Littlewood-Paley family: `[-2,2]^n` for `j = 0` and
    /// `2^{j a}([-2,2]^n \ prod(-2^{-a_k}, 2^{-a_k}))` for `j >= 1`.
    Construction,
}

impl ShellGeometry {
    pub fn as_str(self) -> &'static str {
        match self {
            ShellGeometry::Literal => "literal",
            ShellGeometry::Annular => "annular",
            ShellGeometry::Construction => "construction",
        }
    }

    pub fn region(self, j: u32, a: &AnisotropyVector) -> Region {
        let f = a.dyadic_factors(j as i32);
        match (self, j) {
            (ShellGeometry::Literal, _) => crate::mixed_grid::rect_shell(j as i32, a),
            (ShellGeometry::Annular, _) => crate::mixed_grid::dilated_shell(j as i32, a),
            (ShellGeometry::Construction, 0) => Region::centered_box(&[2.0].repeat(a.dim())),
            (ShellGeometry::Construction, _) => Region::Shell {
                outer: f.iter().map(|s| (-2.0 * s, 2.0 * s)).collect(),
                inner: f
                    .iter()
                    .zip(a.entries())
                    .map(|(s, ak)| (-s * (-ak).exp2(), s * (-ak).exp2()))
                    .collect(),
            },
        }
    }

    /// Half-widths of the bounding box of level `j`.
    pub fn half_widths(self, j: u32, a: &AnisotropyVector) -> Vec<f64> {
        match self.region(j, a).bounding_box() {
            Some(b) => b.iter().map(|(_, hi)| *hi).collect(),
            None => vec![0.0; a.dim()],
        }
    }
}

/// Which quantity an audit computes.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionMode {
    Linf,
    L2,
    Lmixed(ExponentVector),
}

impl ConditionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionMode::Linf => "linf",
            ConditionMode::L2 => "l2",
            ConditionMode::Lmixed(_) => "lmixed",
        }
    }

    fn exponents(&self, n: usize) -> Option<ExponentVector> {
        match self {
            ConditionMode::Linf => None,
            ConditionMode::L2 => Some(ExponentVector::scalar(n, 2.0).expect("2 is a valid exponent")),
            ConditionMode::Lmixed(t) => Some(t.clone()),
        }
    }
}

impl Serialize for ConditionMode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("kind", self.as_str())?;
        if let ConditionMode::Lmixed(t) = self {
            m.serialize_entry("t", t.entries())?;
        }
        m.end()
    }
}

/// One audited `(gamma, j)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizedValue {
    pub gamma: Vec<u32>,
    pub j: u32,
    /// The condition's localized quantity.
    pub value: f64,
    /// `2^{-j alpha} 2^{j a.gamma} ||d^gamma m||_{L^t(R_j)} prod m_k^{-1/t_k}`
    /// with `m_k` the bounding-box side; nondecreasing in `t`.
    pub normalized: Option<f64>,
    /// Largest `|d^gamma m|` over the audited samples.
    pub sup_abs: f64,
    /// `2^{-j a.(1/t)} ||1||_{L^t(R_j)}` on the same samples.
    pub shell_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub symbol: String,
    pub mode: ConditionMode,
    pub geometry: ShellGeometry,
    pub alpha: f64,
    pub budget: u32,
    pub j_audit: u32,
    pub values: Vec<LocalizedValue>,
    pub constant: f64,
    /// Grid suprema underestimate the continuous supremum.
    pub lower_bound: bool,
}

impl ConditionReport {
    /// Supremum of the stored localized values.
    pub fn recomputed_constant(&self) -> f64 {
        self.values.iter().map(|v| v.value).fold(0.0, f64::max)
    }
}

/// Sampling controls for the audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    /// Cells per axis on each level's bounding box; a multiple of 16 keeps
    /// dyadic shell edges on cell boundaries.
    pub cells: usize,
    /// Extra local pass around the `L^inf` argmax.
    pub refine: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            cells: 64,
            refine: true,
        }
    }
}

/// Samples on a regular lattice of `counts[k]` points per axis.
fn lattice(counts: &[usize], coord: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    let total: usize = counts.iter().product();
    let mut pts = Vec::with_capacity(total);
    let mut idx = vec![0usize; counts.len()];
    for _ in 0..total {
        pts.push(idx.iter().enumerate().map(|(k, &i)| coord(k, i)).collect());
        for k in 0..counts.len() {
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    pts
}

/// `|d^gamma m|` for every gamma at every point (zero outside `region`).
fn derivative_table(
    m: &MultiplierSpec,
    gammas: &[Vec<u32>],
    pts: &[Vec<f64>],
    region: &Region,
    steps: &[f64],
    weight: impl Fn(&[f64], &[u32]) -> f64 + Sync,
) -> Result<(Vec<Vec<f64>>, Vec<bool>)> {
    let rows: Vec<(bool, Vec<f64>)> = pts
        .par_iter()
        .map(|xi| {
            if !region.contains(xi).unwrap_or(false) {
                return Ok((false, vec![0.0; gammas.len()]));
            }
            let vals = gammas
                .iter()
                .map(|g| Ok(m.derivative(g, xi, steps)?.norm() * weight(xi, g)))
                .collect::<Result<Vec<_>>>()?;
            Ok((true, vals))
        })
        .collect::<Result<Vec<_>>>()?;
    let inside = rows.iter().map(|(b, _)| *b).collect();
    let table = (0..gammas.len())
        .map(|g| rows.iter().map(|(_, v)| v[g]).collect())
        .collect();
    Ok((table, inside))
}

fn check_audit_inputs(m: &MultiplierSpec, mode: &ConditionMode, a: &AnisotropyVector, opts: &AuditOptions) -> Result<()> {
    if let ConditionMode::Lmixed(t) = mode {
        if t.dim() != a.dim() {
            return Err(Error::Shape("t and a have different dimensions".into()));
        }
        if !t.is_admissible() {
            return domain(format!("t = {:?} is not admissible", t.entries()));
        }
    }
    if opts.cells < 2 || opts.cells % 2 != 0 {
        return domain(format!("audit cells per axis must be even and >= 2, got {}", opts.cells));
    }
    if let DerivativeMode::FiniteDifference { .. } = m.mode {
        if m.budget > FD_MAX_ORDER {
            return Err(Error::Domain(format!(
                "budget N = {} needs derivatives of order > {FD_MAX_ORDER}, unavailable by finite differences",
                m.budget
            )));
        }
    }
    Ok(())
}

/// Audits `m` on levels `0..=j_audit` with default sampling.
pub fn condition_constant(
    m: &MultiplierSpec,
    mode: &ConditionMode,
    a: &AnisotropyVector,
    j_audit: u32,
    geometry: ShellGeometry,
) -> Result<ConditionReport> {
    condition_constant_with(m, mode, a, j_audit, geometry, &AuditOptions::default())
}

pub fn condition_constant_with(
    m: &MultiplierSpec,
    mode: &ConditionMode,
    a: &AnisotropyVector,
    j_audit: u32,
    geometry: ShellGeometry,
    opts: &AuditOptions,
) -> Result<ConditionReport> {
    let mut reports = audit_levels(m, std::slice::from_ref(mode), a, j_audit, geometry, opts)?;
    Ok(reports.remove(0))
}

/// All three conditions from shared samples; `L2` and `Lmixed` at
/// `t = (2, ..., 2)` agree bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullAudit {
    pub linf: ConditionReport,
    pub l2: ConditionReport,
    pub lmixed: ConditionReport,
}

pub fn audit_all(
    m: &MultiplierSpec,
    t: &ExponentVector,
    a: &AnisotropyVector,
    j_audit: u32,
    geometry: ShellGeometry,
    opts: &AuditOptions,
) -> Result<FullAudit> {
    let modes = [ConditionMode::Linf, ConditionMode::L2, ConditionMode::Lmixed(t.clone())];
    let mut r = audit_levels(m, &modes, a, j_audit, geometry, opts)?.into_iter();
    Ok(FullAudit {
        linf: r.next().expect("three reports"),
        l2: r.next().expect("three reports"),
        lmixed: r.next().expect("three reports"),
    })
}

fn audit_levels(
    m: &MultiplierSpec,
    modes: &[ConditionMode],
    a: &AnisotropyVector,
    j_audit: u32,
    geometry: ShellGeometry,
    opts: &AuditOptions,
) -> Result<Vec<ConditionReport>> {
    for mode in modes {
        check_audit_inputs(m, mode, a, opts)?;
    }
    let n = a.dim();
    let gammas = multi_indices(n, m.budget);
    let mut values: Vec<Vec<LocalizedValue>> = vec![Vec::new(); modes.len()];
    let needs_int = modes.iter().any(|md| !matches!(md, ConditionMode::Linf));
    for j in 0..=j_audit {
        let steps = m.steps(j as i32, a);
        let jf = j as f64;
        let level_scale = |g: &[u32]| {
            let ag: f64 = g.iter().zip(a.entries()).map(|(g, a)| *g as f64 * a).sum();
            (jf * (ag - m.alpha)).exp2()
        };
        if needs_int {
            let region = geometry.region(j, a);
            let w = geometry.half_widths(j, a);
            let cells = vec![opts.cells; n];
            let h: Vec<f64> = w.iter().map(|w| 2.0 * w / opts.cells as f64).collect();
            let pts = lattice(&cells, |k, i| -w[k] + (i as f64 + 0.5) * h[k]);
            let (table, inside) = derivative_table(m, &gammas, &pts, &region, &steps, |_, _| 1.0)?;
            let indicator: Vec<f64> = inside.iter().map(|b| if *b { 1.0 } else { 0.0 }).collect();
            for (mi, mode) in modes.iter().enumerate() {
                let Some(t) = mode.exponents(n) else { continue };
                let tr = t.reciprocals();
                let at: f64 = a.entries().iter().zip(&tr).map(|(a, r)| a * r).sum();
                let box_scale: f64 = w.iter().zip(&tr).map(|(w, r)| (2.0 * w).powf(-r)).product();
                let ones = mixed_norm_raw(&indicator, &cells, &h, t.entries())?;
                let shell_factor = (-jf * at).exp2() * ones;
                for (g, col) in gammas.iter().zip(&table) {
                    let norm = mixed_norm_raw(col, &cells, &h, t.entries())?;
                    let ls = level_scale(g);
                    values[mi].push(LocalizedValue {
                        gamma: g.clone(),
                        j,
                        value: ls * (-jf * at).exp2() * norm,
                        normalized: Some(ls * box_scale * norm),
                        sup_abs: col.iter().copied().fold(0.0, f64::max),
                        shell_factor: Some(shell_factor),
                    });
                }
            }
        }
        if let Some(mi) = modes.iter().position(|md| matches!(md, ConditionMode::Linf)) {
            values[mi].extend(linf_level(m, &gammas, a, j, &steps, opts)?);
        }
    }
    Ok(modes
        .iter()
        .zip(values)
        .map(|(mode, vals)| {
            let constant = vals.iter().map(|v| v.value).fold(0.0, f64::max);
            ConditionReport {
                symbol: m.name.clone(),
                mode: mode.clone(),
                geometry: if matches!(mode, ConditionMode::Linf) { ShellGeometry::Literal } else { geometry },
                alpha: m.alpha,
                budget: m.budget,
                j_audit,
                values: vals,
                constant,
                lower_bound: true,
            }
        })
        .collect())
}

/// `sup |(1 + |xi|_a)^{-alpha + a.gamma} d^gamma m(xi)|` over the nodes of
/// the literal level-`j` shell, which together cover `2^{J a}[-2,2]^n`.
fn linf_level(
    m: &MultiplierSpec,
    gammas: &[Vec<u32>],
    a: &AnisotropyVector,
    j: u32,
    steps: &[f64],
    opts: &AuditOptions,
) -> Result<Vec<LocalizedValue>> {
    let n = a.dim();
    let region = ShellGeometry::Literal.region(j, a);
    let w = ShellGeometry::Literal.half_widths(j, a);
    let h: Vec<f64> = w.iter().map(|w| 2.0 * w / opts.cells as f64).collect();
    let pts = lattice(&vec![opts.cells + 1; n], |k, i| -w[k] + i as f64 * h[k]);
    let weight = |xi: &[f64], g: &[u32]| {
        let r = anisotropy::norm_unchecked(xi, a.entries(), anisotropy::DEFAULT_TOL);
        let ag: f64 = g.iter().zip(a.entries()).map(|(g, a)| *g as f64 * a).sum();
        (1.0 + r).powf(ag - m.alpha)
    };
    let (table, _) = derivative_table(m, gammas, &pts, &region, steps, weight)?;
    let mut out = Vec::with_capacity(gammas.len());
    for (g, col) in gammas.iter().zip(&table) {
        let (arg, mut best) = col
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
        if opts.refine && best > 0.0 {
            const R: usize = 8;
            let c = &pts[arg];
            let local = lattice(&vec![2 * R + 1; n], |k, i| c[k] + (i as f64 - R as f64) * h[k] / R as f64);
            let (t, _) = derivative_table(m, std::slice::from_ref(g), &local, &Region::Full, steps, weight)?;
            best = t[0].iter().copied().fold(best, f64::max);
        }
        let sup_abs = best;
        out.push(LocalizedValue {
            gamma: g.clone(),
            j,
            value: best,
            normalized: None,
            sup_abs,
            shell_factor: None,
        });
    }
    Ok(out)
}

/// Inputs and verdict of the boundedness theorem's hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremGate {
    pub admissible: bool,
    pub threshold: Option<u32>,
    pub budget: u32,
    pub condition_constant: Option<f64>,
    pub certified: bool,
}

impl TheoremGate {
    pub fn label(&self) -> &'static str {
        if self.certified {
            "theorem-certified"
        } else {
            "exploratory"
        }
    }
}

/// Evaluates the gate; `audit` is the `L^t` audit of `m`, if any.
pub fn theorem_gate(
    m: &MultiplierSpec,
    p: &ExponentVector,
    q: f64,
    kind: SpaceKind,
    t: &ExponentVector,
    audit: Option<&ConditionReport>,
) -> TheoremGate {
    let (adm, _) = admissible(t);
    let threshold = smoothness_threshold(p, q, t, kind).ok();
    let constant = audit
        .filter(|r| matches!(r.mode, ConditionMode::Lmixed(_)))
        .map(|r| r.constant);
    let certified = adm
        && threshold.is_some_and(|n0| m.budget >= n0)
        && constant.is_some_and(f64::is_finite);
    TheoremGate {
        admissible: adm,
        threshold,
        budget: m.budget,
        condition_constant: constant,
        certified,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberRatio {
    pub index: usize,
    pub source_norm: f64,
    pub target_norm: f64,
    pub ratio: Option<f64>,
    pub skipped: bool,
    pub truncation_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub symbol: String,
    pub kind: SpaceKind,
    pub s: f64,
    pub alpha: f64,
    pub members: Vec<MemberRatio>,
    pub sup: f64,
    pub inf: f64,
    pub gate: TheoremGate,
    pub label: String,
}

fn member_norm(f: &GridFunction, prm: &SpaceParams, fam: &LPFamily) -> Result<(f64, bool)> {
    let r = spaces::space_norm(f, prm, Some(fam))?;
    Ok((r.value, r.truncation_flag))
}

/// Ratios `||T_m f||_{X^s} / ||f||_{X^{s+alpha}}` over an ensemble, with
/// `X` the space of `prm.kind`.
pub fn boundedness_experiment(
    m: &MultiplierSpec,
    prm: &SpaceParams,
    fam: &LPFamily,
    ensemble: &[GridFunction],
    gate: TheoremGate,
) -> Result<BoundednessReport> {
    if ensemble.is_empty() {
        return domain("empty ensemble");
    }
    let source = prm.at_smoothness(prm.s + m.alpha);
    let members = ensemble
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            let (src, f1) = member_norm(f, &source, fam)?;
            let tf = apply_multiplier(m, f)?;
            let (tgt, f2) = member_norm(&tf, prm, fam)?;
            let skipped = !(src > 0.0);
            Ok(MemberRatio {
                index,
                source_norm: src,
                target_norm: tgt,
                ratio: (!skipped).then(|| tgt / src),
                skipped,
                truncation_flag: f1 || f2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = members.iter().filter_map(|m| m.ratio).collect();
    let sup = ratios.iter().copied().fold(0.0, f64::max);
    let inf = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BoundednessReport {
        symbol: m.name.clone(),
        kind: prm.kind,
        s: prm.s,
        alpha: m.alpha,
        members,
        sup,
        inf,
        label: gate.label().to_string(),
        gate,
    })
}
