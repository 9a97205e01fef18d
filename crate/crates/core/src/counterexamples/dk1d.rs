//! One-dimensional family f_ν(x) = η(x/ν)e^{2ix/ν²} with η = φ_κ₀ from the
//! moment lemma. Its L^p_s norm shrinks like ν^{1/p−2s} while the maximal
//! function stays bounded below on (1/4, 1) at t_x = ν²x/4.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bumps::BumpLibrary;
use super::lemma::{default_kappa_grid, lemma_kappa_search, KappaSearch};
use super::x_grid_quarter;
use crate::error::{LabError, Result};
use crate::numerics::{integrate_oscillatory_with, GridSpec, OscillatoryOptions, PolyPhase};
use crate::propagator::{maximal_over_time, Evaluator, TimeGrid};
use crate::report::{Comparison, ExperimentReport, Record};
use crate::spaces::{bessel_potential_norm, SpectralProfile, Support};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DkFamily {
    pub nu: f64,
    pub kappa0: f64,
}

impl DkFamily {
    pub fn new(nu: f64, kappa0: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(LabError::OutOfRange(format!("nu must be in (0, 1), got {nu}")));
        }
        if !(kappa0 > 2.0 * std::f64::consts::SQRT_2) {
            return Err(LabError::HypothesisViolation(format!("kappa0 = {kappa0} must exceed 2*sqrt(2)")));
        }
        Ok(Self { nu, kappa0 })
    }

    /// The family's standing assumption ν < 1/(100κ₀).
    pub fn within_standing_assumption(&self) -> bool {
        self.nu < 1.0 / (100.0 * self.kappa0)
    }

    /// η̂(θ) = ψ̂_band(θ/κ₀), supported in [−κ₀, κ₀].
    pub fn eta_hat(&self, theta: f64) -> f64 {
        BumpLibrary::psi_band_hat(theta / self.kappa0)
    }

    /// f̂_ν(ξ) = ν η̂(νξ − 2/ν).
    pub fn profile(&self) -> Result<SpectralProfile> {
        let me = *self;
        let c = 2.0 / self.nu;
        SpectralProfile::explicit(
            1,
            move |x: &[f64]| Complex64::new(me.nu * me.eta_hat(me.nu * x[0] - c), 0.0),
            Support::Interval {
                lo: (c - self.kappa0) / self.nu,
                hi: (c + self.kappa0) / self.nu,
            },
        )
    }

    pub fn t_x(&self, x: f64) -> f64 {
        0.25 * self.nu * self.nu * x
    }

    /// e^{itΔ}f_ν(x) after θ = νξ − 2/ν:
    /// (2π)^{−1}∫ e^{i[x(θ+2/ν)/ν − t(θ+2/ν)²/ν²]} η̂(θ) dθ.
    pub fn rescaled_evolution(&self, t: f64, x: f64) -> Result<Complex64> {
        let nu = self.nu;
        let c = 2.0 / nu;
        let constant = x * c / nu - t * c * c / (nu * nu);
        let phase = PolyPhase::new(vec![0.0, x / nu - 2.0 * t * c / (nu * nu), -t / (nu * nu)]);
        let q = integrate_oscillatory_with(
            &phase,
            |th| Complex64::new(self.eta_hat(th), 0.0),
            1.0,
            (-self.kappa0, self.kappa0),
            &OscillatoryOptions::absolute(1e-13 * self.kappa0),
        )?;
        Ok(q.value * Complex64::from_polar(1.0, constant.rem_euclid(2.0 * PI)) / (2.0 * PI))
    }

    /// ν^{1/p−2s}‖ℱ⁻¹((ν⁴+(νθ+2)²)^{s/2} η̂)‖_p.
    pub fn reduced_norm(&self, p: f64, s: f64) -> Result<f64> {
        let me = *self;
        let nu = self.nu;
        let reduced = SpectralProfile::explicit(
            1,
            move |x: &[f64]| {
                let w = nu.powi(4) + (nu * x[0] + 2.0).powi(2);
                Complex64::new(w.powf(0.5 * s) * me.eta_hat(x[0]), 0.0)
            },
            Support::Interval {
                lo: -self.kappa0,
                hi: self.kappa0,
            },
        )?;
        // η̂ has width κ₀ and η decays within a few hundred 1/κ₀.
        let half = 800.0 / self.kappa0;
        let grid = GridSpec::new(vec![(-half, half)], vec![4096])?;
        Ok(nu.powf(1.0 / p - 2.0 * s) * bessel_potential_norm(&reduced, 0.0, p, &grid)?)
    }

    /// Window [ν²/64, ν²] of 16 log-spaced times.
    pub fn time_window(&self) -> Result<TimeGrid> {
        let hi = self.nu * self.nu;
        let times = (0..16).map(|i| hi * (-6.0 * i as f64 / 15.0).exp2()).collect();
        TimeGrid::new(times)
    }
}

/// Norm slope against 1/ν (predicted 2s − 1/p), the s = 0 sanity slope, and
/// ν-independence of min_x sup_t |e^{itΔ}f_ν(x)| over x in (1/4, 1).
pub fn dk1d_experiment(p: f64, s: f64, nu_sweep: &[f64]) -> Result<ExperimentReport> {
    if nu_sweep.len() < 3 {
        return Err(LabError::DegenerateSweep(format!("{} sweep points, need 3", nu_sweep.len())));
    }
    let lemma: KappaSearch = lemma_kappa_search(&default_kappa_grid())?;
    let kappa0 = lemma.kappa0;
    let mut report = ExperimentReport::new("counterexample:dk1d");
    report.echo("p", p).echo("s", s).echo("kappa0", kappa0);
    if !(s < 1.0 / (2.0 * p)) {
        report.echo("note", "s >= 1/(2p): outside the range the family refutes");
    }
    let xs = x_grid_quarter();
    let mut mins = Vec::new();
    for &nu in nu_sweep {
        let fam = DkFamily::new(nu, kappa0)?;
        report.push(Record::new("norm", 1.0 / nu, fam.reduced_norm(p, s)?));
        report.push(Record::new("norm_s0", 1.0 / nu, fam.reduced_norm(p, 0.0)?));
        report.push(Record::new(
            "within_standing_assumption",
            1.0 / nu,
            if fam.within_standing_assumption() { 1.0 } else { 0.0 },
        ));
        let profile = fam.profile()?;
        let window = fam.time_window()?;
        let mut worst: Option<(f64, f64, f64)> = None;
        for &x in &xs {
            let grid = window.with_injected(vec![fam.t_x(x)])?;
            let m = maximal_over_time(Evaluator::Spectral, &profile, &[x], &grid)?;
            if worst.map_or(true, |w| m.value < w.0) {
                worst = Some((m.value, m.argmax_t, x));
            }
        }
        let (value, t_star, _) = worst.expect("x grid is nonempty");
        report.push(Record::new("maximal_min", 1.0 / nu, value).with_argmax(t_star));
        mins.push(value);
    }
    report.slope_claim("norm slope vs 1/nu", "norm", 2.0 * s - 1.0 / p, Comparison::Within, 0.1)?;
    report.slope_claim("L^p norm slope vs 1/nu (s = 0)", "norm_s0", -1.0 / p, Comparison::Within, 1e-6)?;
    let hi = mins.iter().cloned().fold(f64::MIN, f64::max);
    let lo = mins.iter().cloned().fold(f64::MAX, f64::min);
    report.check("maximal lower bound ratio max/min", hi / lo, 1.0, Comparison::AtMost, 1.0);
    // |e^{it_xΔ}f_ν(x)| ≥ π^{−1/2}(|∫η| − 4∫|η|u²) on (1/4, 1).
    let c0 = (lemma.integral.abs() - lemma.moment_side) / PI.sqrt();
    report.check("maximal lower bound >= C0", lo, c0, Comparison::AtLeast, 0.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::evolve_spectral;

    #[test]
    fn rescaled_and_direct_agree() {
        let fam = DkFamily::new(0.25, 11.8).unwrap();
        let prof = fam.profile().unwrap();
        assert!(prof.check_support(200).is_ok());
        for &(t, x) in &[(0.001, 0.3), (0.0156, 0.7), (0.05, -0.4)] {
            let a = evolve_spectral(&prof, t, &[x]).unwrap();
            let b = fam.rescaled_evolution(t, x).unwrap();
            assert!((a - b).norm() < 1e-8 * b.norm().max(1e-3), "t={t} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn modulus_at_t_x_is_nu_free() {
        let a = DkFamily::new(0.125, 11.8).unwrap();
        let b = DkFamily::new(0.03125, 11.8).unwrap();
        for x in [0.3, 0.9] {
            let va = a.rescaled_evolution(a.t_x(x), x).unwrap().norm();
            let vb = b.rescaled_evolution(b.t_x(x), x).unwrap().norm();
            assert!((va - vb).abs() < 1e-9 * va);
        }
    }

    #[test]
    fn zero_smoothness_norm_is_a_pure_dilation() {
        let a = DkFamily::new(0.125, 11.8).unwrap().reduced_norm(2.0, 0.0).unwrap();
        let b = DkFamily::new(0.0625, 11.8).unwrap().reduced_norm(2.0, 0.0).unwrap();
        assert!((a / b - 2f64.sqrt()).abs() < 1e-9);
    }
}
