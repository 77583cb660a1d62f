//! Anisotropic geometry on `R^n`.
//!
//! An anisotropy vector `a = (a_1, ..., a_n)` with every `a_k >= 1` defines the
//! dilations `lambda^a x = (lambda^{a_1} x_1, ..., lambda^{a_n} x_n)` and the
//! quasi-homogeneous norm `|x|_a`, the unique `lambda > 0` with
//! `|lambda^{-a} x|_2 = 1`. It satisfies `|lambda^a x|_a = lambda |x|_a` and
//! reduces to the Euclidean norm when `a = (1, ..., 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Relative tolerance used when no explicit tolerance is given.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Anisotropy vector with cached extremes and homogeneous dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AnisotropyVector {
    a: Vec<f64>,
    a_min: f64,
    a_max: f64,
    nu: f64,
}

impl AnisotropyVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return domain("anisotropy vector must have at least one entry");
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return domain(format!("anisotropy entries must be finite and >= 1, got {bad}"));
        }
        let a_min = a.iter().copied().fold(f64::INFINITY, f64::min);
        let a_max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let nu = a.iter().sum();
        Ok(Self { a, a_min, a_max, nu })
    }

    /// The isotropic vector `(1, ..., 1)`.
    pub fn isotropic(n: usize) -> Self {
        Self::new(vec![1.0; n.max(1)]).expect("ones are a valid anisotropy")
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.a
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    /// Homogeneous dimension `a_1 + ... + a_n`.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `a . v` for a vector of the same length.
    pub fn dot(&self, v: &[f64]) -> f64 {
        self.a.iter().zip(v).map(|(a, v)| a * v).sum()
    }

    /// `(1, a_1, ..., a_n)`, the anisotropy of the bracket.
    pub fn with_leading_one(&self) -> Self {
        let mut a = Vec::with_capacity(self.a.len() + 1);
        a.push(1.0);
        a.extend_from_slice(&self.a);
        Self::new(a).expect("prepending 1 keeps entries >= 1")
    }

    /// Per-axis factors `2^{j a_k}`.
    pub fn dyadic_factors(&self, j: i32) -> Vec<f64> {
        self.a.iter().map(|a| (j as f64 * a).exp2()).collect()
    }
}

impl TryFrom<Vec<f64>> for AnisotropyVector {
    type Error = crate::Error;

    fn try_from(a: Vec<f64>) -> Result<Self> {
        Self::new(a)
    }
}

impl From<AnisotropyVector> for Vec<f64> {
    fn from(a: AnisotropyVector) -> Self {
        a.a
    }
}

fn check_dim(a: &AnisotropyVector, x: &[f64]) -> Result<()> {
    if a.dim() != x.len() {
        return domain(format!(
            "point has {} coordinates but anisotropy has {}",
            x.len(),
            a.dim()
        ));
    }
    Ok(())
}

/// Componentwise dilation `lambda^a x`.
pub fn aniso_dilate(lambda: f64, a: &AnisotropyVector, x: &[f64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("dilation factor must be positive, got {lambda}"));
    }
    check_dim(a, x)?;
    Ok(x.iter()
        .zip(a.entries())
        .map(|(x, a)| lambda.powf(*a) * x)
        .collect())
}

/// Quasi-homogeneous norm `|x|_a`.
///
/// Bisection on `u = ln(lambda)` for the root of
/// `sum_k exp(2 (ln|x_k| - a_k u)) = 1`. Working in log space keeps the
/// evaluation free of overflow for any finite input. With
/// `seed = max_k |x_k|^{1/a_k}` the bracket `[seed, seed * sqrt(n)]` always
/// contains the root: the largest term is 1 at the left end and every term is
/// at most `1/n` at the right end.
pub fn aniso_norm(x: &[f64], a: &AnisotropyVector, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    check_dim(a, x)?;
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return domain(format!("point coordinates must be finite, got {bad}"));
    }
    Ok(norm_unchecked(x, a.entries(), tol))
}

pub(crate) fn norm_unchecked(x: &[f64], a: &[f64], tol: f64) -> f64 {
    let logs: Vec<(f64, f64)> = x
        .iter()
        .zip(a)
        .filter(|(x, _)| **x != 0.0)
        .map(|(x, a)| (x.abs().ln(), *a))
        .collect();
    if logs.is_empty() {
        return 0.0;
    }
    if logs.len() == 1 {
        let (lx, a) = logs[0];
        return (lx / a).exp();
    }
    let g = |u: f64| -> f64 { logs.iter().map(|(lx, a)| (2.0 * (lx - a * u)).exp()).sum() };
    let mut lo = logs
        .iter()
        .map(|(lx, a)| lx / a)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut hi = lo + 0.5 * (x.len() as f64).ln();
    // g(lo) >= 1 >= g(hi); g is strictly decreasing.
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Anisotropic bracket `<x> = |(1, x)|_{(1, a)}`, always `>= 1`.
pub fn bracket(x: &[f64], a: &AnisotropyVector) -> f64 {
    let mut y = Vec::with_capacity(x.len() + 1);
    y.push(1.0);
    y.extend_from_slice(x);
    let mut b = Vec::with_capacity(x.len() + 1);
    b.push(1.0);
    b.extend_from_slice(a.entries());
    norm_unchecked(&y, &b, DEFAULT_TOL * 1e-2).max(1.0)
}

/// Empirical constants of `c1 (1+|x|_a)^{a_m} <= 1+|x| <= c2 (1+|x|_a)^{a_M}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EuclidComparison {
    /// Largest `c1` valid on the sample set.
    pub c1_est: f64,
    /// Smallest `c2` valid on the sample set.
    pub c2_est: f64,
}

/// Estimates the comparison constants over `samples` together with the
/// origin, where both sides equal 1; hence `c1_est <= 1 <= c2_est`.
pub fn euclid_comparison(a: &AnisotropyVector, samples: &[Vec<f64>]) -> Result<EuclidComparison> {
    if samples.is_empty() {
        return domain("comparison needs at least one sample point");
    }
    let mut c1 = 1.0_f64;
    let mut c2 = 1.0_f64;
    for x in samples {
        let an = aniso_norm(x, a, DEFAULT_TOL)?;
        let eu = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
        c1 = c1.min(eu / (1.0 + an).powf(a.a_min()));
        c2 = c2.max(eu / (1.0 + an).powf(a.a_max()));
    }
    Ok(EuclidComparison {
        c1_est: c1,
        c2_est: c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn av(v: &[f64]) -> AnisotropyVector {
        AnisotropyVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn vector_invariants() {
        let a = av(&[1.0, 2.5, 1.5]);
        assert_eq!(a.a_min(), 1.0);
        assert_eq!(a.a_max(), 2.5);
        assert_eq!(a.nu(), 5.0);
        assert!(AnisotropyVector::new(vec![0.5]).is_err());
        assert!(AnisotropyVector::new(vec![]).is_err());
        assert!(AnisotropyVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(aniso_dilate(1.0, &av(&[1.0, 3.0]), &[3.0, -2.0]).unwrap(), vec![3.0, -2.0]);
        assert_eq!(aniso_dilate(2.0, &av(&[1.0, 2.0]), &[1.0, 1.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(aniso_dilate(0.5, &av(&[1.0, 1.0]), &[4.0, 4.0]).unwrap(), vec![2.0, 2.0]);
        assert!(aniso_dilate(0.0, &av(&[1.0]), &[1.0]).is_err());
        assert!(aniso_dilate(-1.0, &av(&[1.0]), &[1.0]).is_err());
    }

    #[test]
    fn norm_examples() {
        let a = av(&[1.0, 2.0]);
        assert_eq!(aniso_norm(&[0.0, 0.0], &a, 1e-12).unwrap(), 0.0);
        assert!((aniso_norm(&[0.0, 4.0], &a, 1e-12).unwrap() - 2.0).abs() < 1e-14);
        let iso = av(&[1.0, 1.0, 1.0]);
        let x = [3.0, -4.0, 12.0];
        assert!((aniso_norm(&x, &iso, 1e-12).unwrap() - 13.0).abs() < 13.0 * 1e-11);
        assert!(aniso_norm(&[1.0], &av(&[1.0]), 0.0).is_err());
        assert!(aniso_norm(&[1.0, 2.0], &av(&[1.0]), 1e-12).is_err());
    }

    #[test]
    fn norm_symmetric_exactly() {
        let a = av(&[1.0, 1.7, 2.2]);
        let x = [0.3, -1.9, 4.4];
        let mx: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(aniso_norm(&x, &a, 1e-12).unwrap(), aniso_norm(&mx, &a, 1e-12).unwrap());
    }

    #[test]
    fn norm_huge_coordinates() {
        let a = av(&[1.0, 3.0]);
        let x = [1e200, 1e250];
        let n = aniso_norm(&x, &a, 1e-12).unwrap();
        assert!(n.is_finite() && n > 0.0);
        let y = aniso_dilate(1e-50, &a, &x).unwrap();
        let m = aniso_norm(&y, &a, 1e-12).unwrap();
        assert!((m / n - 1e-50).abs() < 1e-50 * 1e-10);
    }

    #[test]
    fn bracket_examples() {
        let a = av(&[1.0, 2.0]);
        assert_eq!(bracket(&[0.0, 0.0], &a), 1.0);
        let iso = av(&[1.0, 1.0]);
        let x = [2.0, -3.5];
        let expected = (1.0_f64 + 4.0 + 12.25).sqrt();
        assert!((bracket(&x, &iso) - expected).abs() < 1e-12 * expected);
        assert_eq!(bracket(&x, &a), bracket(&[-2.0, 3.5], &a));
    }

    #[test]
    fn comparison_isotropic_and_axis() {
        let iso = av(&[1.0, 1.0]);
        let samples = vec![vec![1.0, 2.0], vec![-3.0, 0.5], vec![10.0, 10.0]];
        let c = euclid_comparison(&iso, &samples).unwrap();
        assert!((c.c1_est - 1.0).abs() < 1e-10 && (c.c2_est - 1.0).abs() < 1e-10);

        // On the x2 axis with a = (1,2): |x|_a = sqrt(|x2|), so
        // (1+|x2|)/(1+sqrt|x2|) brackets 1 between the two exponents.
        let a = av(&[1.0, 2.0]);
        let axis: Vec<Vec<f64>> = (1..50).map(|k| vec![0.0, k as f64 * 0.37]).collect();
        let c = euclid_comparison(&a, &axis).unwrap();
        let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
        for x in &axis {
            let s = x[1].abs().sqrt();
            lo = lo.min((1.0 + x[1].abs()) / (1.0 + s));
            hi = hi.max((1.0 + x[1].abs()) / (1.0 + s).powi(2));
        }
        assert!((c.c1_est - lo).abs() < 1e-9 && (c.c2_est - hi).abs() < 1e-9);
        assert!(c.c1_est <= 1.0 && 1.0 <= c.c2_est);
        assert!(euclid_comparison(&a, &[]).is_err());
    }
}
