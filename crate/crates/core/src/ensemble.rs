//! Seeded test ensembles: anisotropically dilated Gaussian bumps with random
//! centers and phases, band-limited by a smooth spectral cutoff.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropyVector;
use crate::error::{domain, Error, Result};
use crate::littlewood_paley::{LPFamily, Profile};
use crate::mixed_grid::{dft_forward, dft_inverse, Grid, GridFunction, Space};

/// Largest magnitude allowed in the outer margin, relative to the maximum.
pub const DECAY_TOLERANCE: f64 = 1e-10;
/// Fraction of each half-width treated as the outer margin.
pub const MARGIN: f64 = 0.1;

/// Number of standard deviations after which a Gaussian is below
/// [`DECAY_TOLERANCE`].
fn decay_radius() -> f64 {
    (2.0 * (1.0 / DECAY_TOLERANCE).ln()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub count: usize,
    /// Standard deviation of an undilated bump.
    pub width: f64,
    /// Dilation exponents are uniform on `[0, max_dilation]`.
    pub max_dilation: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self {
            count: 20,
            width: 1.0,
            max_dilation: 1.0,
        }
    }
}

impl BumpSpec {
    /// Largest dilation keeping the spectrum below [`DECAY_TOLERANCE`] of
    /// its peak beyond `|xi_k| = edges[k]`, clamped at 0.
    pub fn dilation_limit(width: f64, edges: &[f64], a: &AnisotropyVector) -> f64 {
        a.entries()
            .iter()
            .zip(edges)
            .map(|(ak, e)| (width * e / decay_radius()).log2() / ak)
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    /// Plateau edges `2^{c a_k}` of the cutoff `Theta(2^{-c a} .)`.
    pub fn cutoff_edges(cutoff: i32, a: &AnisotropyVector) -> Vec<f64> {
        a.dyadic_factors(cutoff)
    }
}

/// `e^{i phase} exp(-|2^{dilation a}(x - center)|^2 / (2 width^2))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub dilation: f64,
    pub phase: f64,
    pub width: f64,
}

impl Bump {
    fn sigmas(&self, a: &AnisotropyVector) -> Vec<f64> {
        a.entries().iter().map(|ak| self.width * (-self.dilation * ak).exp2()).collect()
    }

    pub fn eval(&self, x: &[f64], a: &AnisotropyVector) -> Complex64 {
        let e: f64 = x
            .iter()
            .zip(&self.center)
            .zip(self.sigmas(a))
            .map(|((x, c), s)| ((x - c) / s).powi(2))
            .sum();
        Complex64::from_polar((-0.5 * e).exp(), self.phase)
    }
}

/// Draws `spec.count` bumps whose centers keep them below the decay
/// tolerance on the outer margin of the box `prod [-L_k, L_k]`.
pub fn generate_bumps(spec: &BumpSpec, a: &AnisotropyVector, extents: &[f64], seed: u64) -> Result<Vec<Bump>> {
    if extents.len() != a.dim() {
        return Err(Error::Shape(format!(
            "{} extents for dimension {}",
            extents.len(),
            a.dim()
        )));
    }
    if spec.count == 0 || !(spec.width > 0.0 && spec.width.is_finite()) {
        return domain(format!("ensemble needs count > 0 and width > 0, got {spec:?}"));
    }
    if !(spec.max_dilation >= 0.0 && spec.max_dilation.is_finite()) {
        return domain(format!("max_dilation must be finite and >= 0, got {}", spec.max_dilation));
    }
    // The widest bump is the undilated one.
    let reach: Vec<f64> = extents
        .iter()
        .map(|l| (1.0 - MARGIN) * l - decay_radius() * spec.width)
        .collect();
    if let Some(k) = reach.iter().position(|r| *r < 0.0) {
        return domain(format!(
            "bumps of width {} do not fit inside axis {k} with half-width {}",
            spec.width, extents[k]
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..spec.count)
        .map(|_| {
            let dilation = rng.gen_range(0.0..=spec.max_dilation);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let sig: Vec<f64> = a.entries().iter().map(|ak| spec.width * (-dilation * ak).exp2()).collect();
            let center = extents
                .iter()
                .zip(&sig)
                .map(|(l, s)| {
                    let r = (1.0 - MARGIN) * l - decay_radius() * s;
                    rng.gen_range(-r..=r)
                })
                .collect();
            Bump {
                center,
                dilation,
                phase,
                width: spec.width,
            }
        })
        .collect())
}

/// Samples `bump` on `grid`, optionally multiplied in frequency by
/// `Theta(2^{-cutoff a} xi)`. Fails if the cutoff is not resolved or the
/// result does not decay on the outer margin.
pub fn sample_bump(bump: &Bump, grid: &Grid, a: &AnisotropyVector, cutoff: Option<i32>) -> Result<GridFunction> {
    if grid.ndim() != a.dim() || bump.center.len() != a.dim() {
        return Err(Error::Shape("bump, grid and anisotropy dimensions differ".into()));
    }
    let raw = GridFunction::from_fn(grid.clone(), Space::Physical, |x| bump.eval(x, a));
    let f = match cutoff {
        None => raw,
        Some(c) => {
            let resolved = LPFamily::max_resolved_level(a, grid).map_or(-1, |j| j as i32);
            if c > resolved {
                return domain(format!(
                    "cutoff level {c} exceeds the grid's resolved level {resolved}"
                ));
            }
            let theta = Profile::default();
            let down = a.dyadic_factors(-c);
            let fhat = dft_forward(&raw)?;
            let mut xi = vec![0.0; a.dim()];
            let mut idx = vec![0usize; a.dim()];
            let mut vals = fhat.into_values();
            for (flat, v) in vals.iter_mut().enumerate() {
                grid.unravel(flat, &mut idx);
                for k in 0..a.dim() {
                    xi[k] = grid.coord(Space::Frequency, k, idx[k]) * down[k];
                }
                *v *= theta.eval(&xi);
            }
            dft_inverse(&GridFunction::new(grid.clone(), Space::Frequency, vals)?)?
        }
    };
    let tail = margin_fraction(&f);
    if tail > DECAY_TOLERANCE {
        return Err(Error::Precondition(format!(
            "bump at {:?} reaches {tail:e} of its maximum on the outer margin",
            bump.center
        )));
    }
    Ok(f)
}

/// Largest magnitude on the outer margin divided by the overall maximum.
pub fn margin_fraction(f: &GridFunction) -> f64 {
    let grid = f.grid();
    let n = grid.ndim();
    let mut idx = vec![0usize; n];
    let mut tail: f64 = 0.0;
    for (flat, v) in f.values().iter().enumerate() {
        grid.unravel(flat, &mut idx);
        let outer = (0..n).any(|k| grid.coord(Space::Physical, k, idx[k]).abs() > (1.0 - MARGIN) * grid.extents()[k]);
        if outer {
            tail = tail.max(v.norm());
        }
    }
    let max = f.max_abs();
    if max > 0.0 {
        tail / max
    } else {
        0.0
    }
}

/// Generates and samples an ensemble in one step.
pub fn bump_ensemble(
    spec: &BumpSpec,
    grid: &Grid,
    a: &AnisotropyVector,
    cutoff: Option<i32>,
    seed: u64,
) -> Result<Vec<GridFunction>> {
    generate_bumps(spec, a, grid.extents(), seed)?
        .iter()
        .map(|b| sample_bump(b, grid, a, cutoff))
        .collect()
}
