//! Numerical ranges, joint numerical ranges, quantum maps, and joint
//! numerical shadows of Hermitian operator tuples.
//!
//! The crate is organized around a handful of small modules:
//!
//! * [`linalg`] — dense complex matrices and a Hermitian Jacobi eigensolver;
//! * [`states`] — pure states, density matrices, Haar sampling, Bloch bases;
//! * [`numrange`] — the numerical range of a single complex matrix;
//! * [`jnr`] — joint numerical ranges of Hermitian tuples and the
//!   factorization of the range map through an orthogonal projection;
//! * [`channels`] — Kraus-operator quantum maps and the range-shrinking
//!   verifier for unital maps;
//! * [`shadow`] — Monte-Carlo estimation of joint numerical shadows with
//!   moment and histogram views;
//! * [`rng`] — the seeded, substream-capable generator behind all sampling.
//!
//! Everything is deterministic given a seed; batch samplers use one RNG
//! substream per sample index, so worker counts never change results.

pub mod channels;
pub mod error;
pub mod jnr;
pub mod linalg;
pub mod numrange;
pub mod rng;
pub mod shadow;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition};
pub use states::{BlochConvention, BlochVector, DensityMatrix, PureState};
