//! Higher-order forward-mode differentiation.

mod compose;
mod jet;
pub mod linalg;
mod sensitivity;
mod smooth_map;

pub use compose::Composer;
pub use jet::{multi_index_count, sum, Jet, JetSpace, MAX_INTERNAL_ORDER};
pub use sensitivity::{common_space, gradient_of_loss, hamiltonian_field, max_order, seed};
pub use smooth_map::{higher_derivative, jacobian, SmoothMap};
