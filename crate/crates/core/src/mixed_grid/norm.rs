use super::exponent::ExponentVector;
use super::grid::GridFunction;
use super::region::{rect_shell, Region};
use crate::anisotropy::AnisotropyVector;
use crate::error::{Error, Result};

/// Iterated Riemann-sum norm of nonnegative samples.
///
/// Axis 0 (fastest in storage) is integrated first, then axis 1, and so on:
/// `( sum ( sum |f|^{p_1} h_1 )^{p_2/p_1} h_2 ... )^{1/p_n}`, with a maximum
/// along axes where `p_k = inf`.
pub fn mixed_norm_raw(values: &[f64], dims: &[usize], spacing: &[f64], p: &[f64]) -> Result<f64> {
    if dims.len() != p.len() || dims.len() != spacing.len() {
        return Err(Error::Shape(format!(
            "exponent has {} entries for a {}-dimensional grid",
            p.len(),
            dims.len()
        )));
    }
    if values.len() != dims.iter().product::<usize>() {
        return Err(Error::Shape("sample count does not match dims".into()));
    }
    let mut cur: Vec<f64> = values.to_vec();
    for (k, &n) in dims.iter().enumerate() {
        let pk = p[k];
        let h = spacing[k];
        cur = cur.chunks_exact(n).map(|fiber| reduce_fiber(fiber, pk, h)).collect();
    }
    debug_assert_eq!(cur.len(), 1);
    Ok(cur[0])
}

fn reduce_fiber(fiber: &[f64], p: f64, h: f64) -> f64 {
    if p.is_infinite() {
        return fiber.iter().copied().fold(0.0, f64::max);
    }
    let s: f64 = if p == 1.0 {
        fiber.iter().sum()
    } else if p == 2.0 {
        fiber.iter().map(|v| v * v).sum()
    } else {
        fiber.iter().map(|v| v.powf(p)).sum()
    };
    let s = s * h;
    if p == 1.0 {
        s
    } else if p == 2.0 {
        s.sqrt()
    } else {
        s.powf(1.0 / p)
    }
}

/// `||f||_{L^p(R)}` with `p` in `(0, inf]^n`.
pub fn mixed_norm(f: &GridFunction, p: &ExponentVector, region: &Region) -> Result<f64> {
    if p.dim() != f.ndim() {
        return Err(Error::Shape(format!(
            "exponent has {} entries for a {}-dimensional grid",
            p.dim(),
            f.ndim()
        )));
    }
    let mut abs = f.abs();
    if let Some(mask) = region.mask_on(f.grid(), f.space())? {
        for (v, m) in abs.iter_mut().zip(mask) {
            if !m {
                *v = 0.0;
            }
        }
    }
    mixed_norm_raw(&abs, f.dims(), &f.spacings(), p.entries())
}

/// Mixed norm of real nonnegative samples on the grid of `like`.
pub fn mixed_norm_of(abs: &[f64], like: &GridFunction, p: &ExponentVector) -> Result<f64> {
    if p.dim() != like.ndim() {
        return Err(Error::Shape("exponent dimension mismatch".into()));
    }
    mixed_norm_raw(abs, like.dims(), &like.spacings(), p.entries())
}

/// Restricted norm on the annulus `R_j`, divided by the product of
/// bounding-box measures `m_k^{1/t_k}`.
///
/// With `m_k` the discrete measure of the bounding box along axis `k`, the
/// result is an iterated power mean for the uniform probability on the box,
/// so it is nondecreasing in each exponent. In the continuum
/// `m_k = 4 * 2^{j a_k}` for `j >= 1`.
pub fn normalized_shell_norm(
    f: &GridFunction,
    t: &ExponentVector,
    j: i32,
    a: &AnisotropyVector,
) -> Result<f64> {
    let region = rect_shell(j, a);
    normalized_region_norm(f, t, &region)
}

/// As [`normalized_shell_norm`] for any rectangular or annular region.
pub fn normalized_region_norm(f: &GridFunction, t: &ExponentVector, region: &Region) -> Result<f64> {
    let bounds = region
        .bounding_box()
        .ok_or_else(|| Error::Domain("normalization needs a bounded geometric region".into()))?;
    let norm = mixed_norm(f, t, region)?;
    let mut scale = 1.0;
    for (k, (lo, hi)) in bounds.iter().enumerate() {
        let probe = Region::Rect {
            bounds: vec![(*lo, *hi)],
        };
        let count = f
            .axis_coords(k)
            .iter()
            .filter(|x| probe.contains(&[**x]).unwrap())
            .count();
        if count == 0 {
            return Err(Error::Domain(format!("region misses every sample on axis {k}")));
        }
        let m = count as f64 * f.spacing(k);
        scale *= m.powf(-1.0 / t.entries()[k]);
    }
    Ok(norm * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed_grid::grid::{Grid, Space};

    fn ev(v: &[f64]) -> ExponentVector {
        ExponentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn separable_indicator() {
        // 0.01 spacing: x in [-2, 2) with 400 points; indicator of [0,1)^2.
        let g = Grid::cube(2, 400, 2.0).unwrap();
        let f = GridFunction::from_real_fn(g, Space::Physical, |x| {
            if x.iter().all(|v| (0.0..1.0 - 1e-9).contains(v)) {
                1.0
            } else {
                0.0
            }
        });
        let n = mixed_norm(&f, &ev(&[1.0, 2.0]), &Region::Full).unwrap();
        assert!((n - 1.0).abs() < 1e-12, "{n}");
    }

    #[test]
    fn separable_factorizes() {
        let g = Grid::new(vec![64, 48], vec![4.0, 3.0]).unwrap();
        let u = |x: f64| (-x * x).exp() * (1.0 + 0.3 * x.sin());
        let v = |y: f64| 1.0 / (1.0 + y * y);
        let f = GridFunction::from_real_fn(g.clone(), Space::Physical, |x| u(x[0]) * v(x[1]));
        let (p1, p2) = (1.5, 3.0);
        let n = mixed_norm(&f, &ev(&[p1, p2]), &Region::Full).unwrap();
        let h0 = g.spacing(Space::Physical, 0);
        let h1 = g.spacing(Space::Physical, 1);
        let nu: f64 = (g.axis_coords(Space::Physical, 0).iter().map(|x| u(*x).abs().powf(p1)).sum::<f64>() * h0)
            .powf(1.0 / p1);
        let nv: f64 = (g.axis_coords(Space::Physical, 1).iter().map(|y| v(*y).abs().powf(p2)).sum::<f64>() * h1)
            .powf(1.0 / p2);
        assert!((n - nu * nv).abs() < 1e-12 * n);
    }

    #[test]
    fn scalar_exponent_matches_flat_lp() {
        let g = Grid::new(vec![16, 12, 8], vec![1.0, 2.0, 0.5]).unwrap();
        let f = GridFunction::from_real_fn(g.clone(), Space::Physical, |x| (x[0] + 2.0 * x[1] - x[2]).cos());
        let p = 2.7;
        let flat: f64 = f.abs().iter().map(|v| v.powf(p)).sum::<f64>() * g.cell_measure(Space::Physical);
        let n = mixed_norm(&f, &ev(&[p, p, p]), &Region::Full).unwrap();
        assert!((n - flat.powf(1.0 / p)).abs() < 1e-12 * n);
    }

    #[test]
    fn infinity_is_axis_max() {
        let g = Grid::new(vec![4, 3], vec![1.0, 1.0]).unwrap();
        let vals: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let f = GridFunction::from_real(g, Space::Physical, vals).unwrap();
        // max along axis 0 gives 3, 7, 11; then L^1 with h = 2/3.
        let n = mixed_norm(&f, &ev(&[f64::INFINITY, 1.0]), &Region::Full).unwrap();
        assert!((n - 21.0 * 2.0 / 3.0).abs() < 1e-12);
        let n = mixed_norm(&f, &ev(&[f64::INFINITY, f64::INFINITY]), &Region::Full).unwrap();
        assert_eq!(n, 11.0);
    }

    #[test]
    fn region_additivity() {
        let g = Grid::cube(2, 32, 2.0).unwrap();
        let f = GridFunction::from_real_fn(g.clone(), Space::Physical, |x| (x[0] * 3.0).sin() + x[1]);
        let half: Vec<bool> = g.points(Space::Physical).iter().map(|x| x[0] < 0.3).collect();
        let other: Vec<bool> = half.iter().map(|b| !b).collect();
        let p = ev(&[1.7, 1.7]);
        let whole = mixed_norm(&f, &p, &Region::Full).unwrap().powf(1.7);
        let a = mixed_norm(&f, &p, &Region::Mask { mask: half }).unwrap().powf(1.7);
        let b = mixed_norm(&f, &p, &Region::Mask { mask: other }).unwrap().powf(1.7);
        assert!((whole - a - b).abs() < 1e-11 * whole);
    }

    #[test]
    fn shape_errors() {
        let g = Grid::cube(2, 4, 1.0).unwrap();
        let f = GridFunction::zeros(g, Space::Physical);
        assert!(mixed_norm(&f, &ev(&[1.0]), &Region::Full).is_err());
        assert_eq!(mixed_norm(&f, &ev(&[0.5, 0.5]), &Region::Full).unwrap(), 0.0);
    }
}
