//! Fixed smooth bumps shared by the counterexample families.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::{integrate_oscillatory_with, GridSpec, OscillatoryOptions, PolyPhase, SampledField};
use crate::smooth::unit_bump;
use crate::spaces::{inverse_transform_on_grid, SpectralProfile, Support};

/// η_ann on [1, 4] with η_ann(2√2) = 1; η_unit on [−1, 1] with η_unit(0) = 1;
/// φ_ring radial on 1/2 ≤ |ξ| ≤ 2; ψ_band with ψ̂_band = η_unit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BumpLibrary;

const ANN_CENTER: f64 = 2.5;
const ANN_HALF_WIDTH: f64 = 1.5;
const RING_CENTER: f64 = 1.25;
const RING_HALF_WIDTH: f64 = 0.75;

impl BumpLibrary {
    pub fn eta_ann(r: f64) -> f64 {
        let peak = unit_bump((2.0 * SQRT_2 - ANN_CENTER) / ANN_HALF_WIDTH);
        unit_bump((r - ANN_CENTER) / ANN_HALF_WIDTH) / peak
    }

    pub fn eta_unit(u: f64) -> f64 {
        unit_bump(u)
    }

    pub fn phi_ring(r: f64) -> f64 {
        unit_bump((r - RING_CENTER) / RING_HALF_WIDTH)
    }

    pub fn psi_band_hat(xi: f64) -> f64 {
        unit_bump(xi)
    }

    /// ψ_band(y) = (1/π)∫_0^1 η_unit(ξ) cos(yξ) dξ.
    pub fn psi_band(y: f64) -> Result<f64> {
        let phase = PolyPhase::new(vec![0.0, y]);
        let q = integrate_oscillatory_with(
            &phase,
            |xi| Complex64::new(unit_bump(xi), 0.0),
            1.0,
            (0.0, 1.0),
            &OscillatoryOptions::absolute(1e-13),
        )?;
        Ok(q.value.re / PI)
    }

    /// ψ_band sampled on [−half, half] by one inverse DFT of ψ̂_band.
    pub fn psi_band_table(half: f64, step: f64) -> Result<SampledField> {
        let count = (2.0 * half / step).round() as usize + 1;
        let grid = GridSpec::new(vec![(-half, half)], vec![count])?;
        let profile = SpectralProfile::explicit(
            1,
            |x: &[f64]| Complex64::new(unit_bump(x[0]), 0.0),
            Support::Interval { lo: -1.0, hi: 1.0 },
        )?;
        inverse_transform_on_grid(&profile, &grid)
    }

    /// Support and normalization of every bump, sampled; returns the worst
    /// violation.
    pub fn check(samples: usize) -> Result<f64> {
        let mut worst = (Self::eta_ann(2.0 * SQRT_2) - 1.0).abs();
        worst = worst.max((Self::eta_unit(0.0) - 1.0).abs());
        worst = worst.max((Self::psi_band_hat(0.0) - 1.0).abs());
        for i in 0..=samples {
            let u = i as f64 / samples as f64;
            // Outside each support.
            worst = worst.max(Self::eta_ann(1.0 * u).abs());
            worst = worst.max(Self::eta_ann(4.0 + 4.0 * u).abs());
            worst = worst.max(Self::eta_unit(1.0 + u).abs());
            worst = worst.max(Self::phi_ring(0.5 * u).abs());
            worst = worst.max(Self::phi_ring(2.0 + u).abs());
            worst = worst.max(Self::psi_band_hat(-1.0 - u).abs());
        }
        if worst > 1e-10 {
            return Err(LabError::InvalidInput(format!("bump normalization off by {worst:e}")));
        }
        Ok(worst)
    }
}
