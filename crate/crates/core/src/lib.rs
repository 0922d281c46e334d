//! Finite-dimensional quantum channel analysis.
//!
//! Conventions used throughout the crate:
//!
//! * matrices are dense, row-major, complex `f64`;
//! * in a tensor product `A ⊗ B` the left factor is the slow index;
//! * `vec` is column-major, so `vec(N ρ N†) = (N̄ ⊗ N) vec(ρ)`;
//! * Choi matrices are trace-normalized with the input factor first;
//! * entropies are in bits.

pub mod capacity;
pub mod channel;
pub mod config;
pub mod degradability;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod polar;
pub mod qmat;
pub mod random;
pub mod zoo;

pub use channel::{KrausChannel, ReplaceState, StinespringIsometry, ValidationReport};
pub use config::Tolerances;
pub use entanglement::DensityMatrix;
pub use error::{QpdError, Result};
pub use num_complex::Complex64 as C64;
pub use qmat::ComplexMatrix;
