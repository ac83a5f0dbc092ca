//! Trotterized simulation of k-local, time-dependent Lindblad dynamics.
//!
//! The crate evolves density matrices by ordered products of strictly local
//! channels, evaluates a-priori bounds on the resulting error, checks those
//! bounds against a dense exact propagator, and evaluates the resource
//! counts for circuit approximations of the channel products.
//!
//! Module map:
//!
//! - [`model`]: systems, supports, schedules, local operators and k-local Liouvillians.
//! - [`superop`]: vectorization, Liouvillian matrices, exact and inverse propagators.
//! - [`norms`]: Schatten norms, trace distance, Hermitian (1→1)-norm estimation, CPT checks.
//! - [`trotter`]: step counts, local channels, channel products and state evolution.
//! - [`bounds`]: local constants and every a-priori error formula.
//! - [`dilation`]: Kraus extraction, Stinespring unitaries and the gate census.
//! - [`netcount`]: ε-net cardinality bounds and the reachable-set gap.
//!
//! Vectorization is column-stacking throughout: `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`,
//! and site 0 is the most significant tensor factor.

pub mod bounds;
pub mod dilation;
mod error;
pub mod linalg;
pub mod model;
pub mod netcount;
pub mod norms;
mod ode;
pub mod quadrature;
pub mod superop;
pub mod trotter;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
