//! Small dense linear algebra, quasi-Newton and least-squares minimization,
//! and seeded noise.

mod lbfgs;
mod least_squares;
mod matrix;
mod rng;
mod tensor;

pub use lbfgs::{minimize, minimize_objective, Minimum, Objective, OptimizerConfig};
pub use least_squares::{levenberg_marquardt, LeastSquaresConfig, LeastSquaresFit};
pub use matrix::{cholesky, determinant, invert, solve, spd_sqrt, DenseMatrix, Lu};
pub use rng::{gaussian_increments, increments_from, GaussianStream};
pub use tensor::{contract, for_each_index, Tensor};
