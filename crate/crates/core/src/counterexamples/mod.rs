//! Counterexample families and the experiments that measure them.

pub mod annulus;
pub mod bumps;
pub mod dk1d;
pub mod highp;
pub mod lemma;
pub mod linfty;

pub use annulus::{annulus_experiment, radial_split, thin_annulus_experiment, AnnulusFamily, AnnulusKind, RadialSplit};
pub use bumps::BumpLibrary;
pub use dk1d::{dk1d_experiment, DkFamily};
pub use highp::{highp_experiment, highp_experiment_with, HighpFamily};
pub use lemma::{
    default_kappa_grid, lemma_band_limit_check, lemma_kappa_search, lemma_random_suite, random_band_limited,
    BandCheck, BandLimited, BandTerm, KappaSearch,
};
pub use linfty::{
    leading_coefficient, linfty_divergence_experiment, linfty_divergence_experiment_with, LinftyEndpoint,
};

/// 33 evenly spaced interior points of (1/4, 1).
pub fn x_grid_quarter() -> Vec<f64> {
    (1..=33).map(|i| 0.25 + 0.75 * i as f64 / 34.0).collect()
}

/// 33 evenly spaced points of [1/2, 1).
pub fn x_grid_half() -> Vec<f64> {
    (0..33).map(|i| 0.5 + 0.5 * i as f64 / 33.0).collect()
}
