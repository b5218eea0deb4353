//! Computational kernels for the tubular Runge method on the Siegel modular
//! threefold `A₂(2)`.
//!
//! * [`siegel`]: points of the Siegel upper half-space `H₂`, integral
//!   symplectic matrices, their action and reduction to the fundamental domain.
//! * [`theta`]: genus-2 theta constants with half-integral characteristics,
//!   evaluated with a rigorous truncation bound.
//! * [`embedding`]: the map `τ ↦ (Θ_m(τ)⁴)_{m even}` into `P⁹`, vanishing
//!   patterns, the rank of the linear relations and the tube `U_t`.
//! * [`heights`]: Weil heights over `ℚ` and `ℚ(i)` and the explicit height bounds.
//! * [`runge`]: the combinatorics of the Runge condition `m_Y·|S| < r`.
//! * [`cli`]: the `siegel-runge` command-line front end.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod heights;
pub mod runge;
pub mod sampling;
pub mod siegel;
pub mod theta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
