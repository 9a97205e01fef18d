//! Numerical laboratory for Schrödinger maximal estimates on Bessel potential
//! spaces: oscillatory quadrature, Bessel machinery, dispersive kernels and
//! the counterexample families that show the regularity thresholds are sharp.

pub mod counterexamples;
pub mod error;
pub mod numerics;
pub mod oscillatory;
pub mod propagator;
pub mod report;
pub mod smooth;
pub mod spaces;
pub mod special;

pub use error::{LabError, Result};
