//! Numerical differential geometry and stochastic dynamics derived from a
//! single smooth map: an embedding, a metric, a cometric or a matrix group.

pub mod autodiff;
pub mod checks;
pub mod error;
pub mod framebundle;
pub mod geodesics;
pub mod integrate;
pub mod landmarks;
pub mod liegroup;
pub mod manifold;
pub mod numkernel;
pub mod stats;

pub use error::{Error, Result};
