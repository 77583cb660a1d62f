use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Integrability vector with entries in `(0, inf]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ExponentVector(Vec<f64>);

impl ExponentVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return domain("exponent vector must be nonempty");
        }
        if let Some(bad) = entries.iter().find(|p| p.is_nan() || **p <= 0.0) {
            return domain(format!("exponents must lie in (0, inf], got {bad}"));
        }
        Ok(Self(entries))
    }

    /// `(p, ..., p)` in dimension `n`.
    pub fn scalar(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    /// `1/p_k`, with `1/inf = 0`.
    pub fn reciprocals(&self) -> Vec<f64> {
        self.0.iter().map(|p| 1.0 / p).collect()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Hölder conjugate `1/p + 1/p' = 1`, defined on `[1, inf]^n`.
    pub fn conjugate(&self) -> Result<Self> {
        if let Some(bad) = self.0.iter().find(|p| **p < 1.0) {
            return domain(format!("conjugate needs entries >= 1, got {bad}"));
        }
        Ok(Self(
            self.0
                .iter()
                .map(|&p| {
                    if p == 1.0 {
                        f64::INFINITY
                    } else if p.is_infinite() {
                        1.0
                    } else {
                        p / (p - 1.0)
                    }
                })
                .collect(),
        ))
    }

    /// `1 <= t_n <= ... <= t_1 <= 2`.
    pub fn is_admissible(&self) -> bool {
        self.0.iter().all(|t| (1.0..=2.0).contains(t)) && self.0.windows(2).all(|w| w[1] <= w[0])
    }

    /// `1/t_1 + ... + 1/t_n`.
    pub fn reciprocal_sum(&self) -> f64 {
        self.0.iter().map(|t| 1.0 / t).sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &ExponentVector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl TryFrom<Vec<f64>> for ExponentVector {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ExponentVector> for Vec<f64> {
    fn from(p: ExponentVector) -> Self {
        p.0
    }
}

/// Componentwise Hölder conjugate.
pub fn conjugate(p: &ExponentVector) -> Result<ExponentVector> {
    p.conjugate()
}
