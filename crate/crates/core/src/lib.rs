//! Optimal measurements for sets of linearly independent, non-orthogonal
//! pure states.
//!
//! The crate computes the optimal von Neumann measurement `B = U·Vᴴ` from the
//! singular value decomposition of the signal matrix, the optimal
//! unambiguous-discrimination POVM built from the reciprocal states, the
//! average information gain each strategy yields, and the comparison between
//! individual and collective (K-fold joint) measurements.

pub mod collective;
pub mod error;
pub mod infogain;
pub mod matlin;
pub mod signals;
pub mod usd;
pub mod vnopt;

pub use error::{QmError, Result};
