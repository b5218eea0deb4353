//! The Siegel upper half-space `H₂`, the integral symplectic group `Sp₄(ℤ)`
//! and reduction to the fundamental domain of `H₂ / Sp₄(ℤ)`.

mod point;
mod reduction;
mod symplectic;

pub use point::{is_in_h2, SiegelPoint};
pub use reduction::{
    candidate_moves, is_reduced, reduce_to_fundamental_domain, reduce_with, ReductionConfig, ReductionResult,
    DEFAULT_MAX_ITERATIONS, DEFAULT_REDUCTION_TOL,
};
pub use symplectic::{
    act, act_with_epsilon, automorphy_factor, is_symplectic, SymplecticMatrix, DEFAULT_ACT_EPSILON,
};
