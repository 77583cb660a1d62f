//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixnorm_core::{Grid, GridFunction, Space};

/// Centered Gaussian `exp(-|x|^2 / 2)` on a cube grid.
pub fn gaussian(n: usize, samples: usize, half_width: f64) -> GridFunction {
    let grid = Grid::cube(n, samples, half_width).expect("valid cube grid");
    GridFunction::from_real_fn(grid, Space::Physical, |x| (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp())
}

/// Seeded nonnegative fiber.
pub fn fiber(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(0.0..1.0)).collect()
}

/// Seeded points in `[-scale, scale]^n`.
pub fn points(n: usize, count: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect()
}
