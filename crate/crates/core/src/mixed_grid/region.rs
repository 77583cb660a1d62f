use serde::Serialize;

use super::grid::{Grid, Space};
use crate::anisotropy::AnisotropyVector;
use crate::error::{domain, Error, Result};

/// Relative slack for boundary membership on floating-point grids.
const EDGE_EPS: f64 = 1e-9;

fn in_closed(x: f64, lo: f64, hi: f64) -> bool {
    let e = EDGE_EPS * lo.abs().max(hi.abs()).max(1.0);
    x >= lo - e && x <= hi + e
}

fn in_open(x: f64, lo: f64, hi: f64) -> bool {
    let e = EDGE_EPS * lo.abs().max(hi.abs()).max(1.0);
    x > lo + e && x < hi - e
}

/// A subset of `R^n` used to restrict norms.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Full,
    Empty,
    /// Closed box `prod [lo_k, hi_k]`.
    Rect { bounds: Vec<(f64, f64)> },
    /// Closed outer box minus an open inner box.
    Shell {
        outer: Vec<(f64, f64)>,
        inner: Vec<(f64, f64)>,
    },
    /// Boolean lattice in flat grid order.
    Mask { mask: Vec<bool> },
}

impl Region {
    pub fn rect(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo <= hi)) {
            return domain(format!("empty interval [{lo}, {hi}]"));
        }
        Ok(Region::Rect { bounds })
    }

    /// Symmetric box `prod [-w_k, w_k]`.
    pub fn centered_box(half_widths: &[f64]) -> Self {
        Region::Rect {
            bounds: half_widths.iter().map(|w| (-w, *w)).collect(),
        }
    }

    /// Membership of a point; masks need a grid and are rejected here.
    pub fn contains(&self, x: &[f64]) -> Option<bool> {
        match self {
            Region::Full => Some(true),
            Region::Empty => Some(false),
            Region::Rect { bounds } => {
                Some(bounds.iter().zip(x).all(|((lo, hi), x)| in_closed(*x, *lo, *hi)))
            }
            Region::Shell { outer, inner } => {
                let in_outer = outer.iter().zip(x).all(|((lo, hi), x)| in_closed(*x, *lo, *hi));
                let in_inner = inner.iter().zip(x).all(|((lo, hi), x)| in_open(*x, *lo, *hi));
                Some(in_outer && !in_inner)
            }
            Region::Mask { .. } => None,
        }
    }

    /// Bounding box, if the region is geometric and nonempty.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Region::Rect { bounds } => Some(bounds.clone()),
            Region::Shell { outer, .. } => Some(outer.clone()),
            _ => None,
        }
    }

    /// Indicator on the samples of `grid` in `space`; `None` means everything.
    pub fn mask_on(&self, grid: &Grid, space: Space) -> Result<Option<Vec<bool>>> {
        let n = grid.ndim();
        match self {
            Region::Full => Ok(None),
            Region::Empty => Ok(Some(vec![false; grid.len()])),
            Region::Mask { mask } => {
                if mask.len() != grid.len() {
                    return Err(Error::Shape(format!(
                        "mask has {} entries, grid has {}",
                        mask.len(),
                        grid.len()
                    )));
                }
                Ok(Some(mask.clone()))
            }
            Region::Rect { bounds } | Region::Shell { outer: bounds, .. } => {
                if bounds.len() != n {
                    return Err(Error::Shape(format!(
                        "region is {}-dimensional, grid is {n}-dimensional",
                        bounds.len()
                    )));
                }
                if let Region::Shell { inner, .. } = self {
                    if inner.len() != n {
                        return Err(Error::Shape("shell inner box dimension mismatch".into()));
                    }
                }
                let pts = grid.points(space);
                Ok(Some(pts.iter().map(|x| self.contains(x).unwrap()).collect()))
            }
        }
    }
}

/// Punctured cube `[-2,2]^n \ (-1/2,1/2)^n` dilated by `2^{j a}`.
pub fn dilated_shell(j: i32, a: &AnisotropyVector) -> Region {
    let f = a.dyadic_factors(j);
    Region::Shell {
        outer: f.iter().map(|s| (-2.0 * s, 2.0 * s)).collect(),
        inner: f.iter().map(|s| (-0.5 * s, 0.5 * s)).collect(),
    }
}

/// Rectangular annuli: empty for `j < 0`, the box `2^a [-2,2]^n` for `j = 0`
/// and `2^{j a}([-2,2]^n \ (-1/2,1/2)^n)` for `j >= 1`.
pub fn rect_shell(j: i32, a: &AnisotropyVector) -> Region {
    match j {
        j if j < 0 => Region::Empty,
        0 => Region::centered_box(&a.dyadic_factors(1).iter().map(|s| 2.0 * s).collect::<Vec<_>>()),
        j => dilated_shell(j, a),
    }
}

/// The `8^n - 2^n` closed cubes of side `1/2` tiling the punctured cube,
/// dilated by `2^{j a}`.
pub fn shell_cubes(j: i32, a: &AnisotropyVector) -> Result<Vec<Region>> {
    if j < 1 {
        return domain(format!("shell cubes are defined for j >= 1, got {j}"));
    }
    let n = a.dim();
    let f = a.dyadic_factors(j);
    let count = 8usize.pow(n as u32);
    let mut cubes = Vec::with_capacity(count - (1 << n));
    let mut idx = vec![0usize; n];
    for flat in 0..count {
        let mut rem = flat;
        for v in idx.iter_mut() {
            *v = rem % 8;
            rem /= 8;
        }
        // Cells 3 and 4 are [-1/2, 0] and [0, 1/2].
        if idx.iter().all(|&i| i == 3 || i == 4) {
            continue;
        }
        let bounds = idx
            .iter()
            .zip(&f)
            .map(|(&i, s)| {
                let lo = -2.0 + 0.5 * i as f64;
                (lo * s, (lo + 0.5) * s)
            })
            .collect();
        cubes.push(Region::Rect { bounds });
    }
    Ok(cubes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_examples() {
        let a1 = AnisotropyVector::new(vec![1.0]).unwrap();
        assert_eq!(rect_shell(-3, &a1), Region::Empty);
        assert_eq!(
            rect_shell(1, &a1),
            Region::Shell {
                outer: vec![(-4.0, 4.0)],
                inner: vec![(-1.0, 1.0)]
            }
        );
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(
            rect_shell(1, &a),
            Region::Shell {
                outer: vec![(-4.0, 4.0), (-8.0, 8.0)],
                inner: vec![(-1.0, 1.0), (-2.0, 2.0)]
            }
        );
        assert_eq!(rect_shell(0, &a), Region::centered_box(&[4.0, 8.0]));
    }

    #[test]
    fn shell_membership_boundaries() {
        let a1 = AnisotropyVector::new(vec![1.0]).unwrap();
        let r = rect_shell(1, &a1);
        assert_eq!(r.contains(&[4.0]), Some(true));
        assert_eq!(r.contains(&[1.0]), Some(true));
        assert_eq!(r.contains(&[0.999]), Some(false));
        assert_eq!(r.contains(&[4.001]), Some(false));
    }

    #[test]
    fn cube_counts() {
        assert_eq!(shell_cubes(1, &AnisotropyVector::isotropic(1)).unwrap().len(), 6);
        assert_eq!(shell_cubes(2, &AnisotropyVector::isotropic(2)).unwrap().len(), 60);
        assert_eq!(shell_cubes(1, &AnisotropyVector::isotropic(3)).unwrap().len(), 504);
        assert!(shell_cubes(0, &AnisotropyVector::isotropic(1)).is_err());
    }

    #[test]
    fn mask_shape_mismatch() {
        let g = Grid::cube(2, 4, 1.0).unwrap();
        let m = Region::Mask { mask: vec![true; 3] };
        assert!(m.mask_on(&g, Space::Physical).is_err());
        let r = Region::centered_box(&[1.0]);
        assert!(r.mask_on(&g, Space::Physical).is_err());
    }
}
