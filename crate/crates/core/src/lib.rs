//! Commutator factorizations of unitriangular, special linear and
//! Vershik-Kerov matrices into commutators of involutions, skew-involutions
//! and finite-order matrices, with independently checkable certificates.

pub mod certificate;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod generate;
pub mod job;
pub mod matrix;
pub mod mode;
pub mod scalar;
pub mod selftest;
pub mod sl;
pub mod ut;
pub mod vk;

/// Exact scalars: elements of a cyclotomic field over the rationals.
pub type ExactScalar = scalar::Cyc;
/// Float scalars.
pub type FloatScalar = num_complex::Complex64;
pub type ExactMatrix = matrix::Matrix<ExactScalar>;
pub type FloatMatrix = matrix::Matrix<FloatScalar>;
