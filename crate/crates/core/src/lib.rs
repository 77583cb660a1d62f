//! Numerical toolkit for anisotropic mixed-norm harmonic analysis.
//!
//! The crate samples functions on uniform grids and provides quasi-homogeneous
//! norms, Littlewood-Paley blocks, Besov / Triebel-Lizorkin / Sobolev norms,
//! iterated maximal operators and Fourier multipliers with audits of the
//! mixed-norm Hörmander condition.

pub mod anisotropy;
pub mod ensemble;
mod error;
pub mod spaces;
pub mod littlewood_paley;
pub mod maximal;
pub mod multipliers;
pub mod mixed_grid;

pub use anisotropy::{aniso_dilate, aniso_norm, bracket, euclid_comparison, AnisotropyVector};
pub use error::{Error, Result};
pub use mixed_grid::{ExponentVector, Grid, GridFunction, Region, Space};
