//! Quantum and classical Fisher information for two-level Hamiltonians whose
//! levels anti-cross as a parameter λ varies.
//!
//! A model maps λ to coefficients `(ω0, Δ, γ)` of `H = ω0·𝕀 + Δσ3 − γσ1`.
//! From those the crate computes the ground-state and thermal quantum Fisher
//! information, the Fisher information of projective qubit measurements, the
//! information carried by time-evolved superpositions, and simulated
//! estimation experiments benchmarked against the Cramér-Rao bounds.
//!
//! ```
//! use anticross::hamiltonian::{CoefficientBundle, DerivativeBundle};
//! use anticross::metrology::{fisher_projective, qfi_ground, MeasurementDirection};
//!
//! // γ = λ at λ = 1, Δ = 1
//! let c = CoefficientBundle::new(0.0, 1.0, 1.0);
//! let d = DerivativeBundle::new(0.0, 0.0, 1.0);
//! let h = qfi_ground(&c, &d).unwrap();
//! assert!((h - 0.25).abs() < 1e-15);
//!
//! let f = fisher_projective(&c, &d, &MeasurementDirection::SIGMA1).unwrap();
//! assert!((f.value() - h).abs() < 1e-12);
//! ```

pub mod config;
pub mod dynamics;
pub mod error;
pub mod estimate;
pub mod hamiltonian;
pub mod metrology;
pub mod pauli;
pub mod table;
pub mod zoo;

pub use error::{Error, Result};
