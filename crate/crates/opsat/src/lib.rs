//! Exact-arithmetic toolkit for generalized Boolean satisfiability and its
//! relaxation to operator assignments on finite-dimensional Hilbert spaces.
//!
//! Boolean values are `+1` (false) and `-1` (true). A constraint language is a
//! named collection of relations over `{+1, -1}`; an instance applies those
//! relations to scopes of variables and constants. Every relation has a unique
//! multilinear polynomial representation, and an operator assignment (Hermitian
//! involutions commuting within each constraint scope) satisfies a constraint
//! when that polynomial evaluates to `-I`.
//!
//! The crate provides:
//!
//! - [`model`]: relations, languages, instances, Boolean assignments, and their
//!   canonical JSON forms.
//! - [`fourier`]: the multilinear (Walsh-Hadamard) representation of Boolean
//!   functions, clause polynomials, and exact polynomial algebra.
//! - [`classify`]: polymorphism checks, the six Schaefer invariance flags, the
//!   gap verdict, and brute-force evaluation of pp-formulas.
//! - [`solve`]: Boolean decision procedures with verifiable certificates
//!   (brute force, implication-graph 2SAT, unit-resolution Horn/dual-Horn,
//!   parity elimination).
//! - [`matrix`]: exact Gaussian-rational matrices and operator-assignment
//!   verification.
//! - [`spectral`]: exact simultaneous diagonalization of commuting Hermitian
//!   involutions.
//! - [`gadget`]: pp-definition gadget reductions with constructive lifting and
//!   projection of operator solutions.
//! - [`closure`]: Kronecker-product closure operations on operator assignments.
//! - [`contextuality`]: contextuality scenarios, quantum-model verification,
//!   and the clause-to-scenario reduction.
//! - [`gallery`]: canned objects, most prominently the magic-square parity
//!   system and its dimension-4 witness.
//!
//! All arithmetic is exact: scalars are complex numbers with rational real and
//! imaginary parts, and every predicate in the crate is an exact equality.
//! There is no floating point anywhere.

pub mod classify;
pub mod closure;
pub mod contextuality;
pub mod error;
pub mod fourier;
pub mod gadget;
pub mod gallery;
pub mod matrix;
pub mod model;
pub mod report;
pub mod scalar;
pub mod solve;
pub mod spectral;

pub use error::Error;
pub use scalar::{GaussianRational, Rational};
