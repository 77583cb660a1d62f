//! Anisotropic Littlewood-Paley decomposition on a frequency grid.
//!
//! The family is built by telescoping a smooth plateau `Theta` (equal to 1 on
//! `[-1,1]^n`, vanishing outside `(-2,2)^n`):
//!
//! ```text
//! phi0^ = Theta,   phi^(xi) = Theta(xi) - Theta(2^a xi),
//! phi0^ + sum_{j=1}^{J} phi^(2^{-j a} xi) = Theta(2^{-J a} xi).
//! ```
//!
//! so the partition of unity is exact wherever `Theta(2^{-J a} xi) = 1`.
//! `phi^` vanishes on `prod [-2^{-a_k}, 2^{-a_k}]`; for `a = (1,...,1)` its
//! support is the punctured cube `[-2,2]^n \ (-1/2,1/2)^n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::anisotropy::AnisotropyVector;
use crate::error::{domain, Error, Result};
use crate::mixed_grid::{dft_forward, dft_inverse, Grid, GridFunction, Region, Space};

/// Published lower bound: `phi^ >= PHI_LOWER_BOUND` on the middle sub-shell
/// `[-1,1]^n \ prod (-1.5 * 2^{-a_k}, 1.5 * 2^{-a_k})` for the default profile.
pub const PHI_LOWER_BOUND: f64 = 0.5;

/// Distance from a singular endpoint below which the transition is clamped.
const CLAMP: f64 = 1e-12;

fn psi(x: f64) -> f64 {
    if x <= CLAMP {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `C^inf` step: 0 for `t <= 0`, 1 for `t >= 1`, `S(1/2) = 1/2`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= CLAMP {
        0.0
    } else if t >= 1.0 - CLAMP {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

/// One-dimensional plateau profile: 1 on `[-plateau, plateau]`, 0 outside
/// `(-support, support)`, smooth and even, nonincreasing in `|x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Profile {
    pub plateau: f64,
    pub support: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self {
            plateau: 1.0,
            support: 2.0,
        }
    }
}

impl Profile {
    pub fn new(plateau: f64, support: f64) -> Result<Self> {
        if !(plateau > 0.0 && support > plateau && support.is_finite()) {
            return domain(format!("profile needs 0 < plateau < support, got {plateau}, {support}"));
        }
        Ok(Self { plateau, support })
    }

    pub fn eval_1d(&self, x: f64) -> f64 {
        let r = x.abs();
        if r <= self.plateau {
            1.0
        } else if r >= self.support {
            0.0
        } else {
            smooth_step((self.support - r) / (self.support - self.plateau))
        }
    }

    /// Tensor-product `Theta(xi) = prod_k theta(xi_k)`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        let mut v = 1.0;
        for x in xi {
            v *= self.eval_1d(*x);
            if v == 0.0 {
                break;
            }
        }
        v
    }
}

/// Sampled anisotropic Littlewood-Paley family.
#[derive(Debug, Clone)]
pub struct LPFamily {
    a: AnisotropyVector,
    levels: usize,
    phi0_profile: Profile,
    profile: Profile,
    grid: Grid,
    /// `samples[j]` holds `phi_j^` on the frequency grid, `j = 0..=J`.
    samples: Vec<Vec<f64>>,
    overlap: usize,
}

impl LPFamily {
    /// Standard family with `J` blocks beyond `j = 0`; the grid must resolve
    /// the level-`J` block.
    pub fn build(a: &AnisotropyVector, levels: usize, grid: &Grid) -> Result<Self> {
        Self::build_with(a, levels, grid, Profile::default(), Profile::default(), false)
    }

    /// As [`LPFamily::build`], but blocks reaching beyond the grid are
    /// truncated instead of rejected.
    pub fn build_truncated(a: &AnisotropyVector, levels: usize, grid: &Grid) -> Result<Self> {
        Self::build_with(a, levels, grid, Profile::default(), Profile::default(), true)
    }

    /// Largest level whose block is fully inside the frequency grid, if any.
    pub fn max_resolved_level(a: &AnisotropyVector, grid: &Grid) -> Option<usize> {
        let ny = grid.nyquist();
        (0..64usize)
            .take_while(|&j| {
                a.dyadic_factors(j as i32)
                    .iter()
                    .zip(&ny)
                    .all(|(s, n)| 2.0 * s <= *n)
            })
            .last()
    }

    /// Smallest level whose plateau `2^{J a}[-1,1]^n` contains every grid
    /// frequency, so a truncated family of that depth covers the grid.
    pub fn covering_level(a: &AnisotropyVector, grid: &Grid) -> usize {
        let reach: Vec<f64> = (0..grid.ndim())
            .map(|k| (grid.dims()[k] / 2) as f64 * grid.spacing(Space::Frequency, k))
            .collect();
        (0..64usize)
            .find(|&j| a.dyadic_factors(j as i32).iter().zip(&reach).all(|(s, r)| s >= r))
            .unwrap_or(64)
    }

    /// General constructor; `phi0_profile` may differ from `profile`, which
    /// breaks the partition of unity and is used to exercise the residual.
    pub fn build_with(
        a: &AnisotropyVector,
        levels: usize,
        grid: &Grid,
        phi0_profile: Profile,
        profile: Profile,
        accept_truncation: bool,
    ) -> Result<Self> {
        if levels < 1 {
            return domain("a Littlewood-Paley family needs J >= 1");
        }
        if a.dim() != grid.ndim() {
            return Err(Error::Shape(format!(
                "anisotropy is {}-dimensional, grid is {}-dimensional",
                a.dim(),
                grid.ndim()
            )));
        }
        let required: Vec<f64> = a
            .dyadic_factors(levels as i32)
            .iter()
            .map(|s| profile.support * s)
            .collect();
        let available = grid.nyquist();
        if !accept_truncation && required.iter().zip(&available).any(|(r, a)| r > a) {
            return Err(Error::Resolution { required, available });
        }
        let pts = grid.points(Space::Frequency);
        let mut samples = Vec::with_capacity(levels + 1);
        samples.push(pts.iter().map(|xi| phi0_profile.eval(xi)).collect());
        let mut scaled = vec![0.0; a.dim()];
        for j in 1..=levels {
            let f = a.dyadic_factors(-(j as i32));
            samples.push(
                pts.iter()
                    .map(|xi| {
                        for k in 0..xi.len() {
                            scaled[k] = xi[k] * f[k];
                        }
                        phi_hat_with(&profile, a, &scaled)
                    })
                    .collect(),
            );
        }
        // Blocks j and k are disjoint once |j - k| - 1 >= 1/a_k on every axis.
        let overlap = (1.0 / a.a_min()).ceil() as usize;
        Ok(Self {
            a: a.clone(),
            levels,
            phi0_profile,
            profile,
            grid: grid.clone(),
            samples,
            overlap,
        })
    }

    pub fn anisotropy(&self) -> &AnisotropyVector {
        &self.a
    }

    /// Truncation level `J`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Overlap radius `M`: `phi_j^ phi_k^ = 0` for `|j - k| > M`.
    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// Samples of `phi_j^` on the frequency grid.
    pub fn level_samples(&self, j: usize) -> Option<&[f64]> {
        self.samples.get(j).map(|v| v.as_slice())
    }

    /// `phi^(xi) = Theta(xi) - Theta(2^a xi)`.
    pub fn phi_hat(&self, xi: &[f64]) -> f64 {
        phi_hat_with(&self.profile, &self.a, xi)
    }

    /// Pointwise `phi_j^(xi)` for any `j` (zero for negative `j`).
    pub fn phi_hat_level(&self, j: i64, xi: &[f64]) -> f64 {
        match j {
            j if j < 0 => 0.0,
            0 => self.phi0_profile.eval(xi),
            j => {
                let f = self.a.dyadic_factors(-(j as i32));
                let s: Vec<f64> = xi.iter().zip(&f).map(|(x, f)| x * f).collect();
                self.phi_hat(&s)
            }
        }
    }

    /// `Theta(2^{-J a} xi)`, equal to 1 exactly on the covered set.
    pub fn coverage(&self, xi: &[f64]) -> f64 {
        let f = self.a.dyadic_factors(-(self.levels as i32));
        let s: Vec<f64> = xi.iter().zip(&f).map(|(x, f)| x * f).collect();
        self.profile.eval(&s)
    }

    /// Support mask of block `j` on the frequency grid.
    pub fn level_mask(&self, j: usize) -> Option<Vec<bool>> {
        self.level_samples(j).map(|s| s.iter().map(|v| *v != 0.0).collect())
    }

    /// Closed box containing the support of block `j`, and the open box
    /// where it vanishes (`None` for `j = 0`).
    pub fn support_shell(&self, j: usize) -> Region {
        let f = self.a.dyadic_factors(j as i32);
        let outer: Vec<(f64, f64)> = f
            .iter()
            .map(|s| (-self.profile.support * s, self.profile.support * s))
            .collect();
        if j == 0 {
            let w: Vec<f64> = vec![self.phi0_profile.support; self.a.dim()];
            return Region::centered_box(&w);
        }
        let inner = f
            .iter()
            .zip(self.a.entries())
            .map(|(s, a)| {
                let w = self.profile.plateau * s * (-a).exp2();
                (-w, w)
            })
            .collect();
        Region::Shell { outer, inner }
    }

    /// Block `j` sampled as a real frequency-space grid function.
    pub fn level_function(&self, j: usize) -> Result<GridFunction> {
        let s = self
            .level_samples(j)
            .ok_or_else(|| Error::Domain(format!("level {j} outside 0..={}", self.levels)))?;
        GridFunction::from_real(self.grid.clone(), Space::Frequency, s.to_vec())
    }

    /// Support mask of block `j` as a 0/1 frequency-space grid function.
    pub fn mask_function(&self, j: usize) -> Result<GridFunction> {
        let m = self
            .level_mask(j)
            .ok_or_else(|| Error::Domain(format!("level {j} outside 0..={}", self.levels)))?;
        GridFunction::from_real(
            self.grid.clone(),
            Space::Frequency,
            m.into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }

    fn check_grid(&self, f: &GridFunction) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::Shape("function grid differs from the family grid".into()));
        }
        Ok(())
    }

    /// `phi_j^ f^` for a frequency-space input.
    pub fn localize(&self, fhat: &GridFunction, j: usize) -> Result<GridFunction> {
        self.check_grid(fhat)?;
        fhat.require_space(Space::Frequency)?;
        let s = self.level_samples(j).ok_or_else(|| {
            Error::Domain(format!("block index {j} outside 0..={}", self.levels))
        })?;
        let vals = fhat
            .values()
            .iter()
            .zip(s)
            .map(|(v, w)| if *w == 0.0 { Complex64::new(0.0, 0.0) } else { v * *w })
            .collect();
        fhat.with_values(vals)
    }

    /// All blocks `phi_j * f`, `j = 0..=J`, from one forward transform.
    pub fn blocks(&self, f: &GridFunction) -> Result<Vec<GridFunction>> {
        self.check_grid(f)?;
        let fhat = dft_forward(f)?;
        (0..=self.levels)
            .map(|j| dft_inverse(&self.localize(&fhat, j)?))
            .collect()
    }
}

fn phi_hat_with(profile: &Profile, a: &AnisotropyVector, xi: &[f64]) -> f64 {
    let outer = profile.eval(xi);
    if outer == 0.0 {
        return 0.0;
    }
    let mut inner = 1.0;
    for (x, a) in xi.iter().zip(a.entries()) {
        inner *= profile.eval_1d(x * a.exp2());
        if inner == 0.0 {
            break;
        }
    }
    outer - inner
}

/// `phi_j * f` via forward transform, multiplication and inverse transform.
pub fn lp_block(f: &GridFunction, j: usize, fam: &LPFamily) -> Result<GridFunction> {
    if j > fam.levels() {
        return domain(format!("block index {j} outside 0..={}", fam.levels()));
    }
    fam.check_grid(f)?;
    let fhat = dft_forward(f)?;
    dft_inverse(&fam.localize(&fhat, j)?)
}

/// Maximum of `|1 - sum_j phi_j^|` over grid frequencies with
/// `Theta(2^{-J a} xi) = 1`.
pub fn partition_residual(fam: &LPFamily) -> f64 {
    let pts = fam.grid.points(Space::Frequency);
    let mut worst: f64 = 0.0;
    for (i, xi) in pts.iter().enumerate() {
        if fam.coverage(xi) != 1.0 {
            continue;
        }
        let s: f64 = fam.samples.iter().map(|lvl| lvl[i]).sum();
        worst = worst.max((1.0 - s).abs());
    }
    worst
}

/// Number of grid frequencies in the covered set.
pub fn covered_count(fam: &LPFamily) -> usize {
    fam.grid
        .points(Space::Frequency)
        .iter()
        .filter(|xi| fam.coverage(xi) == 1.0)
        .count()
}
