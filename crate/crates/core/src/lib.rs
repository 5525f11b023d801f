//! Finite-precision p-adic arithmetic and the `(ρ,q)`-deformed Haar
//! distribution, Volkenborn integral, Mahler expansion and Radon-Nikodym
//! derivative built on it.

pub mod audit;
pub mod error;
pub mod integration;
pub mod mahler;
pub mod measure;
pub mod padic;
pub mod rhoq;

pub use error::{PadicError, Result};
pub use integration::{ApproximantSequence, IntegrableFunction};
pub use mahler::MahlerSeries;
pub use measure::{Ball, Distribution};
pub use padic::{Norm, PadicNumber, PrecisionBudget};
pub use rhoq::RhoQParams;
