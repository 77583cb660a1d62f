//! Directional and iterated maximal operators, with the vector-valued
//! maximal inequality and the Peetre-type bound as ratio estimators.
//!
//! Windows are runs of contiguous samples containing the evaluation point,
//! clipped at the grid edges. Axes are 0-based.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::mixed_grid::{dft_forward, mixed_norm_of, ExponentVector, GridFunction, Space};

/// Exponents `r` of the iterated operator and per-axis band limits `b`
/// (only needed by [`peetre_ratio`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalParams {
    pub r: ExponentVector,
    pub b: Vec<f64>,
}

impl MaximalParams {
    pub fn new(r: ExponentVector, b: Vec<f64>) -> Result<Self> {
        if let Some(bad) = r.entries().iter().find(|v| !v.is_finite()) {
            return domain(format!("r entries must be finite, got {bad}"));
        }
        if let Some(bad) = b.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return domain(format!("band limits must be positive and finite, got {bad}"));
        }
        if !b.is_empty() && b.len() != r.dim() {
            return Err(Error::Shape("r and b have different dimensions".into()));
        }
        Ok(Self { r, b })
    }

    pub fn without_band(r: ExponentVector) -> Result<Self> {
        Self::new(r, Vec::new())
    }
}

/// Fiber algorithm for [`directional_max_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxAlgorithm {
    /// Convex-hull search, `O(N log^2 N)` per fiber.
    Fast,
    /// All windows, `O(N^2)` per fiber.
    Brute,
}

/// Fixed-point prefix sums of a nonnegative fiber. Samples are rounded up
/// to multiples of `unit = 2^(e - 60)` with `2^e >= max`, so sums and slope
/// comparisons are exact in `i128` and every average is rounded once.
struct Prefix {
    sums: Vec<i128>,
    exp: i32,
}

const FRACTION_BITS: i32 = 60;

/// `x * 2^e` in two steps, so neither factor overflows or underflows on its
/// own for any exponent reachable from finite samples.
fn ldexp(x: f64, e: i32) -> f64 {
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

impl Prefix {
    fn new(v: &[f64]) -> Self {
        assert!(
            v.iter().all(|x| x.is_finite() && *x >= 0.0),
            "fiber samples must be finite and nonnegative"
        );
        let max = v.iter().copied().fold(0.0, f64::max);
        let exp = if max > 0.0 {
            max.log2().ceil() as i32 - FRACTION_BITS
        } else {
            0
        };
        let mut sums = Vec::with_capacity(v.len() + 1);
        let mut acc = 0i128;
        sums.push(acc);
        for x in v {
            acc += ldexp(*x, -exp).ceil() as i128;
            sums.push(acc);
        }
        Self { sums, exp }
    }

    /// `slope(a, b) < slope(c, d)`, `a < b`, `c < d`.
    #[inline]
    fn slope_lt(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let p = &self.sums;
        (p[b] - p[a]) * ((d - c) as i128) < (p[d] - p[c]) * ((b - a) as i128)
    }

    /// Average over prefix points `(l, m)`, correctly rounded.
    fn avg(&self, l: usize, m: usize) -> f64 {
        let num = (self.sums[m] - self.sums[l]) as u128;
        if num == 0 {
            return 0.0;
        }
        let den = (m - l) as u128;
        let shift = num.leading_zeros() as i32 - 1;
        let scaled = num << shift;
        let (q, r) = (scaled / den, scaled % den);
        // q has at least 60 significant bits; folding the remainder into the
        // lowest bit makes the single u128 -> f64 rounding correct.
        let q = q | u128::from(r != 0);
        ldexp(q as f64, self.exp - shift)
    }
}

/// Max window average per sample by enumerating every window.
pub fn fiber_max_brute(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let p = Prefix::new(v);
    let mut best_pair: Vec<Option<(usize, usize)>> = vec![None; n];
    for l in 0..n {
        let mut best = (l, n);
        for r in (l..n).rev() {
            if p.slope_lt(best.0, best.1, l, r + 1) {
                best = (l, r + 1);
            }
            match best_pair[r] {
                Some((a, b)) if !p.slope_lt(a, b, best.0, best.1) => {}
                _ => best_pair[r] = Some(best),
            }
        }
    }
    best_pair
        .into_iter()
        .map(|w| {
            let (l, m) = w.expect("every sample lies in a window");
            p.avg(l, m)
        })
        .collect()
}

/// Max window average per sample. A window `[l, r]` is the pair of prefix
/// points `(l, r + 1)`; for sample `i` the optimum pairs a lower-hull vertex
/// of the prefix points `0..=i` with an upper-hull vertex of `i+1..=N`.
pub fn fiber_max_fast(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let p = Prefix::new(v);

    // Lower hull of prefix points, grown left to right with an undo log.
    let mut lh = vec![0usize; n + 1];
    let mut lt = 0usize;
    let mut undo = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut top = lt;
        // keep lh[top-1] only if it lies strictly below segment lh[top-2]..k
        while top >= 2 && !p.slope_lt(lh[top - 2], lh[top - 1], lh[top - 1], k) {
            top -= 1;
        }
        undo.push((top, lh[top], lt));
        lh[top] = k;
        lt = top + 1;
    }

    // Upper hull of suffix points, stored right to left, grown leftwards.
    let mut rh = vec![0usize; n + 1];
    let mut rt = 0usize;
    let mut out = vec![0.0; n];
    for i in (0..n).rev() {
        let q = i + 1;
        while rt >= 2 && !p.slope_lt(q, rh[rt - 2], q, rh[rt - 1]) {
            rt -= 1;
        }
        rh[rt] = q;
        rt += 1;

        // Best left vertex for right point q: first k where stepping right
        // stops increasing the slope.
        let tangent = |q: usize| -> usize {
            let (mut lo, mut hi) = (0usize, lt - 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if p.slope_lt(lh[mid], q, lh[mid + 1], q) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        // Right hull in left-to-right order: position j is rh[rt - 1 - j].
        let ru = |j: usize| rh[rt - 1 - j];
        let (mut lo, mut hi) = (0usize, rt - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let l = lh[tangent(ru(mid))];
            if p.slope_lt(l, ru(mid), l, ru(mid + 1)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        out[i] = p.avg(lh[tangent(ru(lo))], ru(lo));

        let (top, old, prev_lt) = undo.pop().expect("one undo record per sample");
        lh[top] = old;
        lt = prev_lt;
    }
    out
}

/// Applies `op` to every fiber along `axis` of a flat array.
pub(crate) fn map_fibers<F>(values: &[f64], dims: &[usize], axis: usize, op: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let stride: usize = dims[..axis].iter().product();
    let len = dims[axis];
    let outer = values.len() / (stride * len);
    let fibers: Vec<Vec<f64>> = (0..stride * outer)
        .into_par_iter()
        .map(|f| {
            let base = (f / stride) * stride * len + f % stride;
            let fiber: Vec<f64> = (0..len).map(|i| values[base + i * stride]).collect();
            op(&fiber)
        })
        .collect();
    let mut out = vec![0.0; values.len()];
    for (f, res) in fibers.iter().enumerate() {
        let base = (f / stride) * stride * len + f % stride;
        for (i, v) in res.iter().enumerate() {
            out[base + i * stride] = *v;
        }
    }
    out
}

fn check_axis(f: &GridFunction, axis: usize) -> Result<()> {
    if axis >= f.ndim() {
        return domain(format!("axis {axis} out of range for a {}-dimensional grid", f.ndim()));
    }
    Ok(())
}

/// `M_axis |f|`.
pub fn directional_max(f: &GridFunction, axis: usize) -> Result<GridFunction> {
    directional_max_with(f, axis, MaxAlgorithm::Fast)
}

pub fn directional_max_with(f: &GridFunction, axis: usize, algo: MaxAlgorithm) -> Result<GridFunction> {
    check_axis(f, axis)?;
    let out = max_along(&f.abs(), f.dims(), axis, algo)?;
    f.with_values(out.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

fn max_along(values: &[f64], dims: &[usize], axis: usize, algo: MaxAlgorithm) -> Result<Vec<f64>> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return domain(format!("maximal operator input is not finite ({bad})"));
    }
    Ok(match algo {
        MaxAlgorithm::Fast => map_fibers(values, dims, axis, fiber_max_fast),
        MaxAlgorithm::Brute => map_fibers(values, dims, axis, fiber_max_brute),
    })
}

fn check_r(r: &ExponentVector, n: usize) -> Result<()> {
    if r.dim() != n {
        return Err(Error::Shape(format!("{} exponents for a {n}-dimensional grid", r.dim())));
    }
    if let Some(bad) = r.entries().iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return domain(format!("r entries must be positive and finite, got {bad}"));
    }
    Ok(())
}

/// `(M_n(... M_2(M_1 |f|^{r_1})^{r_2/r_1} ...)^{r_n/r_{n-1}})^{1/r_n}`, as
/// plain nonnegative samples.
pub fn iterated_max_values(f: &GridFunction, r: &ExponentVector, algo: MaxAlgorithm) -> Result<Vec<f64>> {
    check_r(r, f.ndim())?;
    let r = r.entries();
    let mut g: Vec<f64> = f.abs().into_iter().map(|v| v.powf(r[0])).collect();
    for axis in 0..f.ndim() {
        if axis > 0 {
            let e = r[axis] / r[axis - 1];
            g.iter_mut().for_each(|v| *v = v.powf(e));
        }
        g = max_along(&g, f.dims(), axis, algo)?;
    }
    let last = 1.0 / r[f.ndim() - 1];
    g.iter_mut().for_each(|v| *v = v.powf(last));
    Ok(g)
}

/// `M_r f` on the grid of `f`.
pub fn iterated_max(f: &GridFunction, prm: &MaximalParams) -> Result<GridFunction> {
    let g = iterated_max_values(f, &prm.r, MaxAlgorithm::Fast)?;
    f.with_values(g.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// Pointwise `l^q` aggregate of nonnegative sample vectors.
fn lq_aggregate(rows: &[Vec<f64>], q: f64) -> Vec<f64> {
    let len = rows[0].len();
    (0..len)
        .map(|i| {
            if q.is_infinite() {
                rows.iter().map(|r| r[i]).fold(0.0, f64::max)
            } else {
                rows.iter().map(|r| r[i].powf(q)).sum::<f64>().powf(1.0 / q)
            }
        })
        .collect()
}

/// `r_k < min(p_1, ..., p_k, q)` for every `k`.
pub fn check_fefferman_stein(p: &ExponentVector, q: f64, r: &ExponentVector) -> Result<()> {
    if p.dim() != r.dim() {
        return Err(Error::Shape("p and r have different dimensions".into()));
    }
    let mut bound = q;
    for (k, (&pk, &rk)) in p.entries().iter().zip(r.entries()).enumerate() {
        bound = bound.min(pk);
        if rk >= bound {
            return Err(Error::Precondition(format!(
                "r_{} = {rk} must be below min(p_1..p_{}, q) = {bound}",
                k + 1,
                k + 1
            )));
        }
    }
    Ok(())
}

/// `||(sum_j (M_r f_j)^q)^{1/q}||_p / ||(sum_j |f_j|^q)^{1/q}||_p`.
pub fn fefferman_stein_ratio(
    fs: &[GridFunction],
    p: &ExponentVector,
    q: f64,
    prm: &MaximalParams,
) -> Result<f64> {
    let first = fs.first().ok_or_else(|| Error::Domain("empty ensemble".into()))?;
    if q.is_nan() || q <= 0.0 {
        return domain(format!("q must lie in (0, inf], got {q}"));
    }
    check_fefferman_stein(p, q, &prm.r)?;
    for f in fs {
        first.check_compatible(f)?;
    }
    let maxed = fs
        .iter()
        .map(|f| iterated_max_values(f, &prm.r, MaxAlgorithm::Fast))
        .collect::<Result<Vec<_>>>()?;
    let plain: Vec<Vec<f64>> = fs.iter().map(|f| f.abs()).collect();
    let num = mixed_norm_of(&lq_aggregate(&maxed, q), first, p)?;
    let den = mixed_norm_of(&lq_aggregate(&plain, q), first, p)?;
    if den == 0.0 {
        return domain("ensemble has zero norm");
    }
    Ok(num / den)
}

/// Relative spectral energy allowed outside the band in [`peetre_ratio`].
pub const BAND_TOLERANCE: f64 = 1e-10;

/// Fraction of spectral energy of `f` outside `prod [-b_k, b_k]`.
pub fn out_of_band_fraction(f: &GridFunction, b: &[f64]) -> Result<f64> {
    let fhat = dft_forward(f)?;
    let g = fhat.grid();
    let mut idx = vec![0usize; g.ndim()];
    let (mut total, mut outside) = (0.0, 0.0);
    for (flat, v) in fhat.values().iter().enumerate() {
        g.unravel(flat, &mut idx);
        let e = v.norm_sqr();
        total += e;
        let inside = idx
            .iter()
            .enumerate()
            .all(|(k, &i)| g.coord(Space::Frequency, k, i).abs() <= b[k] * (1.0 + 1e-12));
        if !inside {
            outside += e;
        }
    }
    Ok(if total == 0.0 { 0.0 } else { outside / total })
}

/// 1-D weighted max-convolution `out[i] = max_j v[j] w(|i - j|)`.
fn max_convolve(v: &[f64], w: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            v.iter()
                .enumerate()
                .map(|(j, x)| x * w[i.abs_diff(j)])
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Peetre maximal function `sup_z |f(x - z)| / prod_k (1 + b_k |z_k|)^{1/r_k}`
/// over grid shifts.
pub fn peetre_maximal(f: &GridFunction, r: &ExponentVector, b: &[f64]) -> Result<Vec<f64>> {
    check_r(r, f.ndim())?;
    if b.len() != f.ndim() {
        return Err(Error::Shape("band limits do not match the grid dimension".into()));
    }
    let mut g = f.abs();
    for axis in 0..f.ndim() {
        let h = f.grid().spacing(Space::Physical, axis);
        let w: Vec<f64> = (0..f.dims()[axis])
            .map(|d| (1.0 + b[axis] * h * d as f64).powf(-1.0 / r.entries()[axis]))
            .collect();
        g = map_fibers(&g, f.dims(), axis, |fiber| max_convolve(fiber, &w));
    }
    Ok(g)
}

/// `sup_x peetre_maximal(f)(x) / M_r f(x)`.
pub fn peetre_ratio(f: &GridFunction, prm: &MaximalParams) -> Result<f64> {
    f.require_space(Space::Physical)?;
    if prm.b.len() != f.ndim() {
        return Err(Error::Shape("band limits do not match the grid dimension".into()));
    }
    let frac = out_of_band_fraction(f, &prm.b)?;
    if frac > BAND_TOLERANCE {
        return Err(Error::Precondition(format!(
            "function is not band-limited: out-of-band energy fraction {frac:.3e}"
        )));
    }
    let num = peetre_maximal(f, &prm.r, &prm.b)?;
    let den = iterated_max_values(f, &prm.r, MaxAlgorithm::Fast)?;
    Ok(num
        .iter()
        .zip(&den)
        .filter(|(_, d)| **d > 0.0)
        .map(|(n, d)| n / d)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed_grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ev(v: &[f64]) -> ExponentVector {
        ExponentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spike_decay() {
        let mut v = vec![0.0; 9];
        v[4] = 1.0;
        let m = fiber_max_fast(&v);
        for (i, x) in m.iter().enumerate() {
            let d = i.abs_diff(4);
            assert_eq!(*x, 1.0 / (d + 1) as f64);
        }
        assert_eq!(m, fiber_max_brute(&v));
    }

    #[test]
    fn extreme_magnitudes() {
        for scale in [1e-310, 1e-300, 1e-200, 1e200, 1e300] {
            let v: Vec<f64> = [0.0, 3.0, 1.0, 0.0, 2.0].iter().map(|x| x * scale).collect();
            let m = fiber_max_fast(&v);
            assert_eq!(m, fiber_max_brute(&v));
            assert!(m.iter().all(|x| x.is_finite() && *x > 0.0), "{scale}: {m:?}");
            assert!((m[1] / (3.0 * scale) - 1.0).abs() < 1e-12 || scale < 1e-300);
        }
        let g = Grid::cube(1, 4, 1.0).unwrap();
        let f = GridFunction::from_real(g, Space::Physical, vec![1.0, f64::NAN, 0.0, 1.0]).unwrap();
        assert!(matches!(directional_max(&f, 0), Err(Error::Domain(_))));
        let big = f.map(|_| Complex64::new(1e300, 0.0));
        assert!(iterated_max_values(&big, &ev(&[2.0]), MaxAlgorithm::Fast).is_err());
    }

    #[test]
    fn fast_matches_brute_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..80 {
            let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            assert_eq!(fiber_max_fast(&v), fiber_max_brute(&v), "n = {n}");
            let ints: Vec<f64> = (0..n).map(|_| rng.gen_range(0..4) as f64).collect();
            assert_eq!(fiber_max_fast(&ints), fiber_max_brute(&ints), "ints n = {n}");
        }
    }

    #[test]
    fn constant_and_domination() {
        let g = Grid::cube(2, 12, 1.0).unwrap();
        let f = GridFunction::from_real_fn(g.clone(), Space::Physical, |_| 0.75);
        let m = iterated_max(&f, &MaximalParams::without_band(ev(&[1.0, 1.0])).unwrap()).unwrap();
        assert!(m.values().iter().all(|v| v.re == 0.75));
        let h = GridFunction::from_real_fn(g, Space::Physical, |x| (x[0] * 3.0).sin() * x[1]);
        let prm = MaximalParams::without_band(ev(&[0.5, 2.0])).unwrap();
        let m = iterated_max(&h, &prm).unwrap();
        for (a, b) in m.values().iter().zip(h.values()) {
            assert!(a.re >= b.norm() * (1.0 - 1e-14));
        }
        assert!(directional_max(&h, 2).is_err());
    }

    #[test]
    fn fefferman_stein_gate() {
        let g = Grid::cube(2, 8, 1.0).unwrap();
        let f = GridFunction::from_real_fn(g, Space::Physical, |_| 2.0);
        let ok = MaximalParams::without_band(ev(&[1.0, 1.0])).unwrap();
        let ratio = fefferman_stein_ratio(&[f.clone()], &ev(&[2.0, 2.0]), 2.0, &ok).unwrap();
        assert!((ratio - 1.0).abs() < 1e-14);
        let bad = MaximalParams::without_band(ev(&[1.0, 2.0])).unwrap();
        match fefferman_stein_ratio(&[f], &ev(&[3.0, 2.0]), 4.0, &bad) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("r_2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn peetre_rejects_broadband() {
        let g = Grid::cube(1, 64, 4.0).unwrap();
        let mut vals = vec![Complex64::new(0.0, 0.0); 64];
        vals[20] = Complex64::new(1.0, 0.0);
        let f = GridFunction::new(g, Space::Physical, vals).unwrap();
        let prm = MaximalParams::new(ev(&[1.0]), vec![1.0]).unwrap();
        assert!(matches!(peetre_ratio(&f, &prm), Err(Error::Precondition(_))));
    }
}

#[cfg(test)]
mod stress {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fast_matches_brute_long_fibers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = rng.gen_range(1..=2048);
            let c = rng.gen_range(0.0..n as f64);
            let w = rng.gen_range(1.0..200.0);
            let v: Vec<f64> = (0..n)
                .map(|i| match trial % 4 {
                    0 => rng.gen::<f64>(),
                    1 => (-((i as f64 - c) / w).powi(2)).exp(),
                    2 => 0.1,
                    _ => rng.gen::<f64>().powi(8) * 1e3,
                })
                .collect();
            assert_eq!(fiber_max_fast(&v), fiber_max_brute(&v), "trial {trial}, n = {n}");
        }
    }
}
