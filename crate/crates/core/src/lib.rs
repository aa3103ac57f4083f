//! Conic optimization over sandwiched Renyi entropy cones.
//!
//! The crate is organized around a pipeline:
//!
//! - [`hermitian`]: dense complex Hermitian linear algebra (eigendecomposition,
//!   spectral functions, Frechet derivatives via divided differences, Kronecker
//!   products, direct sums, partial traces).
//! - [`scalar`]: the scalar function descriptors those spectral operations consume.
//! - [`tracefn`]: the sandwiched Renyi trace function, divergence, perspectives,
//!   and their directional derivatives up to third order.
//! - [`barrier`]: self-concordant barrier oracles for the supported cones.
//! - [`verify`]: a sampling engine that numerically certifies barrier and
//!   convexity properties and reports worst-case violations.
//! - [`solver`]: a feasible-start primal path-following interior-point method
//!   for conic problems assembled from the barrier oracles.
//! - [`rng`]: the deterministic counter-based generator used everywhere
//!   randomness is needed, so runs are reproducible from a seed.

pub mod barrier;
pub(crate) mod gemm;
pub mod hermitian;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod tracefn;
pub mod vectorize;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use hermitian::{
    direct_sum, eigh, frechet_derivative, hermitize, kron, partial_trace, spectral_apply,
    EigenDecomposition, HermitianMatrix,
};
pub use scalar::ScalarFunction;
pub use tracefn::{DirectionPair, TraceFnParams};

/// Library version, reported by downstream tooling.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix storage.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix storage.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector storage.
pub type RVector = nalgebra::DVector<f64>;
