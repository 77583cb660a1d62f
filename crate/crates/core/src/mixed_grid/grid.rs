use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which side of the Fourier transform a set of samples lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Physical,
    Frequency,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Frequency => "frequency",
        }
    }
}

/// Uniform rectangular lattice shared by a physical grid and its dual.
///
/// Axis `k` has `dims[k]` samples. Physical samples sit at
/// `x = -L_k + i h_k` with `h_k = 2 L_k / N_k`; frequency samples sit at
/// `xi = (i - floor(N_k/2)) pi / L_k`. Axis 0 varies fastest in flat storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dims: Vec<usize>,
    extents: Vec<f64>,
}

impl Grid {
    pub fn new(dims: Vec<usize>, extents: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.len() != extents.len() {
            return Err(Error::Shape(format!(
                "dims ({}) and extents ({}) must be nonempty and equal length",
                dims.len(),
                extents.len()
            )));
        }
        if let Some(d) = dims.iter().find(|d| **d < 2) {
            return domain(format!("every axis needs at least 2 samples, got {d}"));
        }
        if let Some(l) = extents.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return domain(format!("extents must be positive and finite, got {l}"));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, d| acc.checked_mul(*d))
            .ok_or_else(|| Error::Shape("grid too large".into()))?;
        if total > (1 << 28) {
            return Err(Error::Shape(format!("grid has {total} samples, limit is 2^28")));
        }
        Ok(Self { dims, extents })
    }

    /// Same sample count on every axis.
    pub fn cube(n: usize, samples: usize, half_width: f64) -> Result<Self> {
        Self::new(vec![samples; n], vec![half_width; n])
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spacing `h_k` (physical) or `pi / L_k` (frequency).
    pub fn spacing(&self, space: Space, k: usize) -> f64 {
        match space {
            Space::Physical => 2.0 * self.extents[k] / self.dims[k] as f64,
            Space::Frequency => std::f64::consts::PI / self.extents[k],
        }
    }

    pub fn spacings(&self, space: Space) -> Vec<f64> {
        (0..self.ndim()).map(|k| self.spacing(space, k)).collect()
    }

    /// Quadrature weight of one cell.
    pub fn cell_measure(&self, space: Space) -> f64 {
        self.spacings(space).iter().product()
    }

    /// Coordinate of sample `i` on axis `k`.
    pub fn coord(&self, space: Space, k: usize, i: usize) -> f64 {
        match space {
            Space::Physical => -self.extents[k] + i as f64 * self.spacing(space, k),
            Space::Frequency => {
                (i as f64 - (self.dims[k] / 2) as f64) * self.spacing(space, k)
            }
        }
    }

    pub fn axis_coords(&self, space: Space, k: usize) -> Vec<f64> {
        (0..self.dims[k]).map(|i| self.coord(space, k, i)).collect()
    }

    /// Largest `|xi_k|` such that `[-|xi_k|, |xi_k|]` lies in the frequency grid.
    pub fn nyquist(&self) -> Vec<f64> {
        (0..self.ndim())
            .map(|k| (self.dims[k] - 1 - self.dims[k] / 2) as f64 * self.spacing(Space::Frequency, k))
            .collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.ndim());
        let mut acc = 1;
        for d in &self.dims {
            s.push(acc);
            acc *= d;
        }
        s
    }

    /// Writes the multi-index of flat position `flat` into `idx`.
    pub fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for (k, d) in self.dims.iter().enumerate() {
            idx[k] = flat % d;
            flat /= d;
        }
    }

    /// Coordinates of every sample, flattened point-major.
    pub fn points(&self, space: Space) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.ndim()).map(|k| self.axis_coords(space, k)).collect();
        let mut idx = vec![0; self.ndim()];
        (0..self.len())
            .map(|f| {
                self.unravel(f, &mut idx);
                idx.iter().enumerate().map(|(k, i)| axes[k][*i]).collect()
            })
            .collect()
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    space: Space,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, space: Space, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, space, values })
    }

    pub fn zeros(grid: Grid, space: Space) -> Self {
        let n = grid.len();
        Self {
            grid,
            space,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_real(grid: Grid, space: Space, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, space, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every grid point of `space`.
    pub fn from_fn(grid: Grid, space: Space, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let axes: Vec<Vec<f64>> = (0..grid.ndim()).map(|k| grid.axis_coords(space, k)).collect();
        let mut idx = vec![0; grid.ndim()];
        let mut x = vec![0.0; grid.ndim()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.unravel(flat, &mut idx);
                for k in 0..x.len() {
                    x[k] = axes[k][idx[k]];
                }
                f(&x)
            })
            .collect();
        Self { grid, space, values }
    }

    pub fn from_real_fn(grid: Grid, space: Space, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, space, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        self.grid.dims()
    }

    pub fn extents(&self) -> &[f64] {
        self.grid.extents()
    }

    pub fn ndim(&self) -> usize {
        self.grid.ndim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.grid.spacing(self.space, k)
    }

    pub fn spacings(&self) -> Vec<f64> {
        self.grid.spacings(self.space)
    }

    pub fn cell_measure(&self) -> f64 {
        self.grid.cell_measure(self.space)
    }

    pub fn axis_coords(&self, k: usize) -> Vec<f64> {
        self.grid.axis_coords(self.space, k)
    }

    /// Same grid and space, new samples.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.space, values)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            space: self.space,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise binary operation on two functions over the same grid.
    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            space: self.space,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape("grid functions live on different grids".into()));
        }
        if self.space != other.space {
            return Err(Error::State {
                expected: self.space.as_str(),
                found: other.space.as_str(),
            });
        }
        Ok(())
    }

    pub fn require_space(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::State {
                expected: space.as_str(),
                found: self.space.as_str(),
            });
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn retag(mut self, space: Space) -> Self {
        self.space = space;
        self
    }
}
