//! Resurrected stable positive self-similar Markov processes.
//!
//! The crate builds the Lamperti representation of a strictly α-stable process
//! on (0,∞) whose exits below zero are replaced by scale-invariant returns,
//! computes characteristic exponents and resurrection kernels, classifies the
//! behaviour at the absorption time and simulates paths.

pub mod classify;
pub mod cli;
pub mod error;
pub mod estimates;
pub mod kernels;
pub mod phi;
pub mod quad;
pub mod roots;
pub mod simulate;
pub mod specfun;
pub mod stable;
pub mod stats;

pub use classify::{ClassificationReport, Verdict};
pub use error::{Error, Result};
pub use kernels::ResurrectionKernel;
pub use phi::{DiracPhi, ExpPhi, PhiMeasure, PolyPhi, TabulatedPhi};
pub use simulate::{LevyPath, PssmpPath, SimConfig};
pub use specfun::ComplexValue;
pub use stable::StableParams;
