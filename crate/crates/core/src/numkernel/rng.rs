//! Seeded Gaussian noise.
//!
//! Uniforms come from xoshiro256++ (seeded through SplitMix64 by
//! `seed_from_u64`), normals from the Box–Muller transform. Both are fully
//! specified algorithms, so a given `(seed, stream)` yields the same bits on
//! every platform.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::numkernel::DenseMatrix;

/// Single-owner stream of standard normal variates.
pub struct GaussianStream {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Independent stream for trajectory `index` of a run seeded with `seed`.
    pub fn for_stream(seed: u64, index: u64) -> Self {
        let mixed = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        GaussianStream::new(mixed.rotate_left(17) ^ index)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard normal variate.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }
}

/// `n_steps × dim` matrix of i.i.d. `N(0, dt)` increments.
pub fn gaussian_increments(dim: usize, n_steps: usize, dt: f64, seed: u64) -> Result<DenseMatrix> {
    let mut stream = GaussianStream::new(seed);
    increments_from(&mut stream, dim, n_steps, dt)
}

/// Like [`gaussian_increments`] but drawing from an existing stream.
pub fn increments_from(
    stream: &mut GaussianStream,
    dim: usize,
    n_steps: usize,
    dt: f64,
) -> Result<DenseMatrix> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if n_steps < 1 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    let sd = dt.sqrt();
    let data = (0..n_steps * dim).map(|_| sd * stream.standard_normal()).collect();
    DenseMatrix::from_vec(n_steps, dim, data)
}
