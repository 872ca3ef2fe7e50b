//! Entangled ergodic averages and diagonal-measure limits for unitary
//! dynamics with pure point or weakly mixing spectrum.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex vectors and matrices.
//! * [`spectral`]: unitaries given by their eigensystem, phases on the circle
//!   and the Cesàro kernel.
//! * [`partitions`]: pair-partitions indexing entangled products.
//! * [`entangled`]: entangled Cesàro means and their limits.
//! * [`models`]: the cyclic rotation and Bernoulli shift systems.
//! * [`diagonal`]: averages along `Ad_{U^m1} ⊗ Ad_{U^m2}` and their limits.

pub mod diagonal;
pub mod entangled;
pub mod error;
pub mod linalg;
pub mod models;
pub mod partitions;
pub mod random;
pub mod report;
pub mod spectral;

pub use entangled::EntangledInstance;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use models::{BernoulliShiftSystem, CyclicRotationSystem, DynamicalSystem};
pub use num_complex::Complex64;
pub use partitions::PairPartition;
pub use report::ConvergenceReport;
pub use spectral::{Phase, SpectralUnitary};
