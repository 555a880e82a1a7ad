//! Numerical laboratory for completeness defects of mixed systems
//! `{g_λ}_{Λ₁} ∪ {K_λ}_{Λ₂}` built from reproducing kernels and their
//! biorthogonals, in the Paley-Wiener space and in de Branges spaces.
//!
//! The crate is generic over the scalar type via [`Scalar`]; everything is
//! exercised at `f64` (see the type aliases at the crate root).

pub mod cardinal;
pub mod contraction;
pub mod counterexample;
pub mod debranges;



pub mod error;
pub mod herglotz;
pub mod pair_sigma;

pub mod product;

pub mod scalar;
pub mod seq;
pub mod special;

pub use error::Error;
pub use scalar::{cast, LogComplex, Scalar};

/// Concrete scalar used by the CLI and the acceptance suite.
pub type F64 = f64;
/// Single-precision scalar (compiles, but tolerances in this crate assume f64).
pub type F32 = f32;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type SampledEntire64 = cardinal::SampledEntire<f64>;
pub type ProductFunction64 = product::ProductFunction<f64>;
pub type CauchyTransform64 = herglotz::CauchyTransform<f64>;
pub type BlockState64 = contraction::BlockState<f64>;
pub type PairSystem64 = pair_sigma::PairSystem<f64>;
pub type Bundle64 = counterexample::CounterexampleBundle<f64>;
pub type ClarkModel64 = debranges::ClarkModel<f64>;
