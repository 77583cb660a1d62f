//! Sampled functions on uniform grids: mixed-norm quadrature, Fourier
//! transforms in the continuous convention, rectangular annuli and the
//! classical mixed inequalities.

mod exponent;
mod fourier;
mod grid;
mod inequalities;
pub mod io;
mod norm;
mod region;

pub use exponent::{conjugate, ExponentVector};
pub use fourier::{dft_forward, dft_inverse};
pub(crate) use fourier::multiply_frequency;
pub use grid::{Grid, GridFunction, Space};
pub use inequalities::{
    hausdorff_young_check, hausdorff_young_constant, holder_check, HausdorffYoungOutcome,
    HolderOutcome,
};
pub use norm::{mixed_norm, mixed_norm_of, mixed_norm_raw, normalized_region_norm, normalized_shell_norm};
pub use region::{dilated_shell, rect_shell, shell_cubes, Region};
