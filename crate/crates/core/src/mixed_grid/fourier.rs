//! Continuous-convention discrete Fourier transforms.
//!
//! Forward: `F(xi) = sum_x f(x) e^{-i x.xi} prod h_k`, approximating
//! `int f(x) e^{-i x.xi} dx`. Inverse: `f(x) = (2 pi)^{-n} sum_xi F(xi)
//! e^{i x.xi} prod dxi_k`. With `h_k dxi_k = 2 pi / N_k` the pair is an exact
//! inverse on the lattice, so a multiplier `m = 1` acts as the identity.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use super::grid::{GridFunction, Space};
use crate::error::Result;

/// `exp(2 pi i r / n)` with exact values at quarter turns.
fn unit_root(r: usize, n: usize) -> Complex64 {
    let r = r % n;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == n {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == n {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * r == 3 * n {
        return Complex64::new(0.0, -1.0);
    }
    let th = 2.0 * PI * r as f64 / n as f64;
    Complex64::new(th.cos(), th.sin())
}

struct AxisPlan {
    fft: Arc<dyn Fft<f64>>,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
}

fn axis_plan(planner: &mut FftPlanner<f64>, n: usize, inverse: bool, scale: f64) -> AxisPlan {
    let c = n / 2;
    // Forward: pre e^{+2 pi i j c / N}, post (-1)^{m-c} * h.
    // Inverse: pre (-1)^m, post e^{i pi c} e^{-2 pi i j c / N} / (N h).
    let sign = |m: usize| if m % 2 == 0 { 1.0 } else { -1.0 };
    if !inverse {
        AxisPlan {
            fft: planner.plan_fft_forward(n),
            pre: (0..n).map(|j| unit_root(j * c % n, n)).collect(),
            post: (0..n)
                .map(|m| Complex64::new(sign(m + 2 * n - c) * scale, 0.0))
                .collect(),
        }
    } else {
        let half_turn = Complex64::new(sign(c), 0.0);
        AxisPlan {
            fft: planner.plan_fft_inverse(n),
            pre: (0..n).map(|m| Complex64::new(sign(m), 0.0)).collect(),
            post: (0..n)
                .map(|j| half_turn * unit_root(n - j * c % n, n) * scale)
                .collect(),
        }
    }
}

fn transform(f: &GridFunction, inverse: bool) -> Vec<Complex64> {
    let grid = f.grid();
    let dims = grid.dims();
    let strides = grid.strides();
    let total = grid.len();
    let mut data = f.values().to_vec();
    let mut planner = FftPlanner::new();
    for (k, &n) in dims.iter().enumerate() {
        let h = grid.spacing(Space::Physical, k);
        let scale = if inverse { 1.0 / (n as f64 * h) } else { h };
        let plan = axis_plan(&mut planner, n, inverse, scale);
        let stride = strides[k];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.fft.get_inplace_scratch_len()];
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (i, b) in buf.iter_mut().enumerate() {
                    *b = data[start + i * stride] * plan.pre[i];
                }
                plan.fft.process_with_scratch(&mut buf, &mut scratch);
                for (i, b) in buf.iter().enumerate() {
                    data[start + i * stride] = *b * plan.post[i];
                }
            }
        }
    }
    data
}

/// Physical samples to frequency samples on the dual lattice.
pub fn dft_forward(f: &GridFunction) -> Result<GridFunction> {
    f.require_space(Space::Physical)?;
    let values = transform(f, false);
    GridFunction::new(f.grid().clone(), Space::Frequency, values)
}

/// Frequency samples back to physical samples, including `(2 pi)^{-n}`.
pub fn dft_inverse(f: &GridFunction) -> Result<GridFunction> {
    f.require_space(Space::Frequency)?;
    let values = transform(f, true);
    GridFunction::new(f.grid().clone(), Space::Physical, values)
}

/// Multiplies frequency samples by `symbol(xi)` evaluated on the dual grid.
pub(crate) fn multiply_frequency(
    fhat: &GridFunction,
    mut symbol: impl FnMut(&[f64]) -> Result<Complex64>,
) -> Result<GridFunction> {
    fhat.require_space(Space::Frequency)?;
    let grid = fhat.grid();
    let axes: Vec<Vec<f64>> = (0..grid.ndim())
        .map(|k| grid.axis_coords(Space::Frequency, k))
        .collect();
    let mut idx = vec![0; grid.ndim()];
    let mut xi = vec![0.0; grid.ndim()];
    let mut out = Vec::with_capacity(grid.len());
    for (flat, v) in fhat.values().iter().enumerate() {
        grid.unravel(flat, &mut idx);
        for k in 0..xi.len() {
            xi[k] = axes[k][idx[k]];
        }
        out.push(*v * symbol(&xi)?);
    }
    GridFunction::new(grid.clone(), Space::Frequency, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed_grid::grid::Grid;

    #[test]
    fn gaussian_transform_1d() {
        let g = Grid::new(vec![512], vec![16.0]).unwrap();
        let f = GridFunction::from_real_fn(g, Space::Physical, |x| (-x[0] * x[0] / 2.0).exp());
        let fh = dft_forward(&f).unwrap();
        let xi = fh.axis_coords(0);
        let mut err: f64 = 0.0;
        for (x, v) in xi.iter().zip(fh.values()) {
            if x.abs() <= 8.0 {
                let exact = (2.0 * PI).sqrt() * (-x * x / 2.0).exp();
                err = err.max((v - exact).norm());
            }
        }
        assert!(err <= 1e-6, "max error {err}");
    }

    #[test]
    fn roundtrip_odd_and_even() {
        for dims in [vec![7usize, 10], vec![16, 9], vec![5, 5, 6]] {
            let ext: Vec<f64> = (0..dims.len()).map(|k| 1.0 + k as f64 * 0.7).collect();
            let g = Grid::new(dims, ext).unwrap();
            let f = GridFunction::from_fn(g, Space::Physical, |x| {
                Complex64::new((x.iter().sum::<f64>() * 1.3).sin(), x[0].cos() * 0.5)
            });
            let back = dft_inverse(&dft_forward(&f).unwrap()).unwrap();
            let err = back.sub(&f).unwrap().max_abs();
            assert!(err < 1e-12 * f.max_abs().max(1.0), "{err}");
        }
    }

    #[test]
    fn odd_grid_matches_direct_sum() {
        let g = Grid::new(vec![7], vec![1.3]).unwrap();
        let f = GridFunction::from_real_fn(g.clone(), Space::Physical, |x| 1.0 + x[0] * x[0]);
        let fh = dft_forward(&f).unwrap();
        let xs = g.axis_coords(Space::Physical, 0);
        let h = g.spacing(Space::Physical, 0);
        for (m, xi) in g.axis_coords(Space::Frequency, 0).iter().enumerate() {
            let direct: Complex64 = xs
                .iter()
                .zip(f.values())
                .map(|(x, v)| v * Complex64::from_polar(h, -x * xi))
                .sum();
            assert!((direct - fh.values()[m]).norm() < 1e-12);
        }
    }

    #[test]
    fn space_tags_enforced() {
        let g = Grid::cube(1, 8, 1.0).unwrap();
        let f = GridFunction::zeros(g, Space::Frequency);
        assert!(dft_forward(&f).is_err());
        assert!(dft_inverse(&f.clone().retag(Space::Physical)).is_err());
    }
}
