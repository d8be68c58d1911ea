//! Multilevel quasi-Monte Carlo integration of Gaussian expectations with
//! fast orthogonal transforms.
//!
//! The crate is organised bottom-up:
//!
//! * [`low_discrepancy`]: Sobol points, random shifts, seeded pseudorandom
//!   uniforms and the inverse normal CDF.
//! * [`ortho`]: Householder reflections and chains, the orthonormal Haar
//!   transform, and the forward / PCA / Brownian bridge path maps.
//! * [`regress`]: the regression algorithm that turns linear-regression
//!   coefficients of an integrand's inner functions into a Householder chain.
//! * [`mlevel`]: coarsening, level plans and the telescoping multilevel
//!   estimator.
//! * [`asian`]: the discretely monitored Black-Scholes Asian call.
//! * [`harness`]: replicated experiments and report emission.

pub mod asian;
pub mod error;
pub mod harness;
pub mod low_discrepancy;
pub mod mlevel;
pub mod ortho;
pub mod regress;

pub use error::{Error, Result};
