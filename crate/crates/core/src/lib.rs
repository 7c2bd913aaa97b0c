//! Number-scaling structures and a complex scalar scaling field acting on
//! one- and two-particle quantum mechanics over discretized 1D grids.
//!
//! The crate has two halves. The algebraic half ([`scaled`], [`numerals`])
//! implements scaled complex-number structures with exact rational and IEEE
//! double backends, plus a positional string-numeral system whose unit string
//! fixes the scaling factor. The physics half ([`field`], [`packet`],
//! [`operators`], [`spectral`], [`evolve`], [`pair`]) implements the scaling
//! field g = e^(alpha + i beta), its gradient connection, localized wave
//! packets, covariant operators, momentum kernels, Crank-Nicolson evolution,
//! and two- / n-particle extensions.

pub mod error;
pub mod exact;
pub mod scaled;
pub mod numerals;
pub mod grid;
pub mod field;
pub mod packet;
pub mod operators;
pub mod spectral;
pub mod evolve;
pub mod pair;

pub use error::{Error, Result};
pub use exact::ExactComplex;
pub use grid::{Grid1D, PhysicalConstants};
pub use field::{ConnectionGradient, FieldSpec, Profile};
pub use packet::{LocalizedPacket, WavePacket};
pub use pair::{PairReference, Statistics, TwoParticlePacket};

pub use num_complex::Complex64;
pub use num_rational::BigRational;

pub use ndarray;
