//! Grids, Fourier transforms, adaptive and oscillatory quadrature, and
//! log-log regression.

pub mod dft;
pub mod fit;
pub mod grid;
pub mod quadrature;

pub use dft::{dft_forward, dft_inverse};
pub use fit::{fit_power_law, least_squares, PowerLawFit};
pub use grid::{GridSpec, SampledField, MEMORY_CAP};
pub use quadrature::{
    integrate_adaptive, integrate_oscillatory_1d, integrate_oscillatory_with, integrate_panels,
    FnPhase, OscillatoryOptions, Phase1D, PolyPhase, QuadratureOptions, QuadratureResult,
};

/// `count` points 2^{start}, 2^{start+step}, ... spaced evenly in log₂.
pub fn dyadic_sweep(start_exp: f64, stop_exp: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start_exp.exp2()];
    }
    (0..count)
        .map(|i| {
            let e = start_exp + (stop_exp - start_exp) * i as f64 / (count - 1) as f64;
            e.exp2()
        })
        .collect()
}
