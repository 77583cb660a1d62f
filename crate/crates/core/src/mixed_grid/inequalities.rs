use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::exponent::ExponentVector;
use super::fourier::dft_forward;
use super::grid::{GridFunction, Space};
use super::norm::mixed_norm;
use super::region::Region;
use crate::error::{domain, Result};

/// `|int f conj(g)| / (||f||_p ||g||_{p'})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderOutcome {
    pub ratio: f64,
    /// Set when either norm vanishes; the ratio is then reported as 0.
    pub degenerate: bool,
}

/// Mixed Hölder inequality on the grid. The Riemann-sum measure makes it an
/// exact discrete inequality, so `ratio <= 1` up to rounding.
pub fn holder_check(f: &GridFunction, g: &GridFunction, p: &ExponentVector) -> Result<HolderOutcome> {
    f.check_compatible(g)?;
    let pc = p.conjugate()?;
    let nf = mixed_norm(f, p, &Region::Full)?;
    let ng = mixed_norm(g, &pc, &Region::Full)?;
    if nf == 0.0 || ng == 0.0 {
        return Ok(HolderOutcome {
            ratio: 0.0,
            degenerate: true,
        });
    }
    let inner: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        * f.cell_measure();
    Ok(HolderOutcome {
        ratio: inner.norm() / (nf * ng),
        degenerate: false,
    })
}

/// Mixed Hausdorff-Young ratios for an admissible exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffYoungOutcome {
    /// `||f^||_{t'} / ||f||_t` under the unnormalized transform.
    pub raw: f64,
    /// `raw / prod_k (2 pi)^{1/t'_k}`: the ratio for the unitary transform,
    /// at most 1.
    pub normalized: f64,
}

/// The factor `prod_k (2 pi)^{1/t'_k}` relating the transforms.
pub fn hausdorff_young_constant(t: &ExponentVector) -> Result<f64> {
    let tc = t.conjugate()?;
    Ok(tc.reciprocals().iter().map(|r| (2.0 * PI).powf(*r)).product())
}

pub fn hausdorff_young_check(f: &GridFunction, t: &ExponentVector) -> Result<HausdorffYoungOutcome> {
    if !t.is_admissible() {
        return domain(format!(
            "Hausdorff-Young needs 1 <= t_n <= ... <= t_1 <= 2, got {:?}",
            t.entries()
        ));
    }
    f.require_space(Space::Physical)?;
    let fh = dft_forward(f)?;
    let num = mixed_norm(&fh, &t.conjugate()?, &Region::Full)?;
    let den = mixed_norm(f, t, &Region::Full)?;
    if den == 0.0 {
        return domain("Hausdorff-Young ratio of the zero function");
    }
    let raw = num / den;
    Ok(HausdorffYoungOutcome {
        raw,
        normalized: raw / hausdorff_young_constant(t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed_grid::grid::Grid;

    fn ev(v: &[f64]) -> ExponentVector {
        ExponentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn holder_equality_case() {
        let g = Grid::cube(2, 24, 2.0).unwrap();
        let f = GridFunction::from_fn(g, Space::Physical, |x| {
            Complex64::from_polar((-x[0] * x[0] - 0.5 * x[1] * x[1]).exp(), x[0] + 2.0 * x[1])
        });
        for p in [1.5, 2.0, 3.0] {
            let gg = f.map(|v| {
                if v.norm() == 0.0 {
                    v
                } else {
                    v / v.norm() * v.norm().powf(p - 1.0)
                }
            });
            let out = holder_check(&f, &gg, &ev(&[p, p])).unwrap();
            assert!((out.ratio - 1.0).abs() < 1e-12, "{p}: {}", out.ratio);
        }
    }

    #[test]
    fn holder_degenerate() {
        let g = Grid::cube(1, 8, 1.0).unwrap();
        let f = GridFunction::zeros(g.clone(), Space::Physical);
        let h = GridFunction::from_real_fn(g, Space::Physical, |x| x[0]);
        let out = holder_check(&f, &h, &ev(&[2.0])).unwrap();
        assert!(out.degenerate && out.ratio == 0.0);
    }

    #[test]
    fn plancherel_constant() {
        let g = Grid::cube(2, 32, 6.0).unwrap();
        let f = GridFunction::from_real_fn(g, Space::Physical, |x| (-(x[0] - 0.3).powi(2) - x[1] * x[1]).exp() * (1.0 + x[1]));
        let out = hausdorff_young_check(&f, &ev(&[2.0, 2.0])).unwrap();
        assert!((out.raw - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
        assert!((out.normalized - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_admissible() {
        let g = Grid::cube(2, 8, 1.0).unwrap();
        let f = GridFunction::from_real_fn(g, Space::Physical, |_| 1.0);
        assert!(hausdorff_young_check(&f, &ev(&[1.0, 2.0])).is_err());
    }
}
