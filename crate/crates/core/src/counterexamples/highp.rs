//! Chirped ring f̂_λ(ξ) = e^{i|ξ|²/2}φ_ring(ξ/λ). At t = 1/2 the propagator
//! cancels the chirp, so e^{iΔ/2}f_λ = λⁿφ_ring^∨(λx) is large on B(0,1)
//! while f_λ itself is spread over |x| ~ λ.
//!
//! Spatial norms of f_λ use the lens identity
//! e^{iτΔ}g(y) = (4πiτ)^{−n/2}e^{i|y|²/(4τ)}ℱ[e^{i|·|²/(4τ)}g](y/(2τ)),
//! which at τ = −1/2 gives |f_λ(x)| = (2π)^{−n/2}|H_λ(−x/λ)| with
//! H_λ = ℱ[e^{−i|w|²/(2λ²)}φ^∨]. Sampling f_λ directly would need ~λ²
//! points per dimension.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bumps::BumpLibrary;
use crate::error::{LabError, Result};
use crate::numerics::{dft_forward, GridSpec, SampledField};
use crate::propagator::{evolve_radial, evolve_spectral};
use crate::report::{Comparison, ExperimentReport, Record};
use crate::spaces::{
    full_domain, inverse_transform_on_grid, lp_norm, radial_inverse, weak_lp_quasinorm, SpectralProfile, Support,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighpFamily {
    pub n: usize,
    pub lambda: f64,
}

fn ring(n: usize, weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<SpectralProfile> {
    SpectralProfile::radial(
        n,
        move |r| Complex64::new(BumpLibrary::phi_ring(r) * weight(r), 0.0),
        Support::Annulus { inner: 0.5, outer: 2.0 },
    )
}

impl HighpFamily {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(LabError::UnsupportedDimension(n));
        }
        if !(lambda >= 1.0) {
            return Err(LabError::OutOfRange(format!("lambda must be >= 1, got {lambda}")));
        }
        Ok(Self { n, lambda })
    }

    pub fn profile(&self) -> Result<SpectralProfile> {
        let lambda = self.lambda;
        Ok(SpectralProfile::radial(
            self.n,
            move |r| Complex64::new(BumpLibrary::phi_ring(r / lambda), 0.0),
            Support::Annulus {
                inner: 0.5 * lambda,
                outer: 2.0 * lambda,
            },
        )?
        .with_chirp(0.5))
    }

    /// e^{iΔ/2}f_λ(x) through the propagator (chirp folded into the phase).
    pub fn evolved_half(&self, x: &[f64]) -> Result<Complex64> {
        let profile = self.profile()?;
        match self.n {
            1 => evolve_spectral(&profile, 0.5, x),
            _ => evolve_radial(&profile, 0.5, x.iter().map(|v| v * v).sum::<f64>().sqrt()),
        }
    }

    /// λⁿφ_ring^∨(λ|x|) by the radial inverse of the unscaled ring.
    pub fn dilated_ring(&self, xnorm: f64) -> Result<Complex64> {
        let unit = ring(self.n, |_| 1.0)?;
        Ok(radial_inverse(&unit, self.lambda * xnorm, 1e-12)? * self.lambda.powi(self.n as i32))
    }

    /// H_λ = ℱ[e^{−i|w|²/(2λ²)}φ_s^∨] with φ_s(ν) = φ_ring(ν)(1+λ²|ν|²)^{s/2},
    /// sampled on the dual of a w-grid.
    fn lens_transform(&self, s: f64) -> Result<SampledField> {
        let lambda = self.lambda;
        let weighted = ring(self.n, move |r| (1.0 + lambda * lambda * r * r).powf(0.5 * s))?;
        let (half, count) = if self.n == 1 { (1024.0, 4096) } else { (256.0, 1024) };
        let grid = GridSpec::cube(self.n, -half, half, count)?;
        let mut field = inverse_transform_on_grid(&weighted, &grid)?;
        for (flat, v) in field.values.iter_mut().enumerate() {
            let w = field.grid.point(flat);
            let w2: f64 = w[..self.n].iter().map(|u| u * u).sum();
            *v *= Complex64::from_polar(1.0, -w2 / (2.0 * lambda * lambda));
        }
        field.conjugate_origin = None;
        dft_forward(&field)
    }

    /// ‖f_λ‖_{L^p_s} = (2π)^{−n/2}λ^{n/p}‖H_λ‖_p.
    pub fn norm(&self, p: f64, s: f64) -> Result<f64> {
        let h = self.lens_transform(s)?;
        let n = self.n as f64;
        Ok((2.0 * PI).powf(-0.5 * n) * self.lambda.powf(n / p) * lp_norm(&h, p, &full_domain(&h.grid))?)
    }

    /// max over 3λ ≤ |x| ≤ 6λ of |f_λ(x)|·|x|^N / λ^{n−N}. Samples of H
    /// below 1e−12 of its peak are roundoff and count as zero.
    pub fn far_field_constant(&self, order: i32) -> Result<f64> {
        let h = self.lens_transform(0.0)?;
        let n = self.n as f64;
        let floor = 1e-12 * h.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for (flat, v) in h.values.iter().enumerate() {
            let nu = h.grid.point(flat);
            let r = nu[..self.n].iter().map(|u| u * u).sum::<f64>().sqrt();
            if (3.0..=6.0).contains(&r) && v.norm() > floor {
                let x = self.lambda * r;
                let f = (2.0 * PI).powf(-0.5 * n) * v.norm();
                worst = worst.max(f * x.powi(order) / self.lambda.powf(n - order as f64));
            }
        }
        Ok(worst)
    }

    /// λⁿφ^∨(λx) on a grid covering B(0,1), zero outside the ball.
    pub fn evolved_half_field(&self) -> Result<SampledField> {
        let unit = ring(self.n, |_| 1.0)?;
        let half_w = self.lambda.max(64.0);
        let step = 0.25;
        let count = (2.0 * half_w / step).round() as usize;
        let grid = GridSpec::cube(self.n, -half_w, half_w, count)?;
        let table = inverse_transform_on_grid(&unit, &grid)?;
        let x_grid = GridSpec::cube(self.n, -half_w / self.lambda, half_w / self.lambda, count)?;
        let scale = self.lambda.powi(self.n as i32);
        let values = table
            .values
            .iter()
            .enumerate()
            .map(|(flat, v)| {
                let x = x_grid.point(flat);
                let r2: f64 = x[..self.n].iter().map(|u| u * u).sum();
                if r2 <= 1.0 {
                    v * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        SampledField::new(x_grid, values)
    }
}

/// Unit-ball box for the weak quasinorm.
fn unit_box(n: usize) -> Vec<(f64, f64)> {
    vec![(-1.0, 1.0); n]
}

/// t = 1/2 identity, weak quasinorm on B(0,1) (slope n(1−1/p)), ‖f_λ‖_{L^p}
/// (slope ≤ n/p) and ‖f_λ‖_{L^p_s} (slope ≤ s + n/p), far-field decay.
pub fn highp_experiment(n: usize, p: f64, s: f64, lambda_sweep: &[f64]) -> Result<ExperimentReport> {
    highp_experiment_with(n, p, s, lambda_sweep, 2)
}

pub fn highp_experiment_with(
    n: usize,
    p: f64,
    s: f64,
    lambda_sweep: &[f64],
    far_order: i32,
) -> Result<ExperimentReport> {
    if lambda_sweep.len() < 3 {
        return Err(LabError::DegenerateSweep(format!("{} sweep points, need 3", lambda_sweep.len())));
    }
    if !(p >= 2.0) {
        return Err(LabError::OutOfRange(format!("high-p family needs p >= 2, got {p}")));
    }
    let mut report = ExperimentReport::new("counterexample:highp");
    report.echo("n", n).echo("p", p).echo("s", s).echo("far_field_order", far_order);
    let tol = 0.1;
    let mut identity_error = 0.0f64;
    for &lambda in lambda_sweep {
        let fam = HighpFamily::new(n, lambda)?;
        fam.profile()?.check_support(400)?;
        // (a) identity at 64 points of B(0,1).
        let points: Vec<Vec<f64>> = (0..64)
            .map(|i| {
                let u = -1.0 + 2.0 * (i as f64 + 0.5) / 64.0;
                if n == 1 {
                    vec![u]
                } else {
                    vec![u, 0.37 * u]
                }
            })
            .collect();
        let pairs: Vec<(Complex64, Complex64)> = points
            .par_iter()
            .map(|x| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok((fam.evolved_half(x)?, fam.dilated_ring(r)?))
            })
            .collect::<Result<_>>()?;
        let peak = pairs.iter().map(|(_, b)| b.norm()).fold(0.0, f64::max);
        let err = pairs.iter().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / peak;
        identity_error = identity_error.max(err);
        // (b)-(d)
        let field = fam.evolved_half_field()?;
        report.push(Record::new("weak_norm", lambda, weak_lp_quasinorm(&field, p, &unit_box(n))?));
        report.push(Record::new("lp_norm", lambda, fam.norm(p, 0.0)?));
        report.push(Record::new("lps_norm", lambda, fam.norm(p, s)?));
        report.push(Record::new("far_field_constant", lambda, fam.far_field_constant(far_order)?));
    }
    let nf = n as f64;
    report.check("t = 1/2 identity (max relative error)", identity_error, 0.0, Comparison::AtMost, 1e-6);
    report.slope_claim("weak quasinorm slope", "weak_norm", nf * (1.0 - 1.0 / p), Comparison::Within, tol)?;
    report.slope_claim("L^p norm slope", "lp_norm", nf / p, Comparison::AtMost, tol)?;
    report.slope_claim("L^p_s norm slope", "lps_norm", s + nf / p, Comparison::AtMost, tol)?;
    let far = report.series("far_field_constant");
    let first = far[0].1.max(f64::MIN_POSITIVE);
    let worst = far.iter().map(|&(_, c)| c / first).fold(0.0, f64::max);
    report.check("far-field constant bounded across lambda", worst, 1.0, Comparison::AtMost, 3.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plancherel_through_the_lens() {
        for n in [1, 2] {
            let fam = HighpFamily::new(n, 16.0).unwrap();
            let spatial = fam.norm(2.0, 0.0).unwrap();
            // ‖f̂_λ‖₂² = λⁿ|S^{n−1}|∫φ_ring(r)² r^{n−1} dr.
            let measure = crate::special::sphere_measure(n).unwrap();
            let radial = crate::numerics::integrate_adaptive(
                |r| Complex64::new(BumpLibrary::phi_ring(r).powi(2) * r.powi(n as i32 - 1), 0.0),
                0.5,
                2.0,
                1e-12,
            )
            .unwrap()
            .value
            .re;
            let spectral = (16f64.powi(n as i32) * measure * radial).sqrt() / (2.0 * PI).powf(0.5 * n as f64);
            assert!((spatial / spectral - 1.0).abs() < 1e-6, "n={n}: {spatial} vs {spectral}");
        }
    }

    #[test]
    fn lens_matches_direct_evaluation() {
        // |f_λ(x)| at a few points, directly against the lens transform.
        let fam = HighpFamily::new(1, 16.0).unwrap();
        let prof = fam.profile().unwrap();
        let h = fam.lens_transform(0.0).unwrap();
        for i in [1500usize, 1900, 2048, 2300] {
            let nu = h.grid.coordinate(0, i);
            let x = -nu * fam.lambda;
            let direct = evolve_spectral(&prof, 0.0, &[x]).unwrap().norm();
            let lens = h.values[i].norm() / (2.0 * PI).sqrt();
            assert!((direct - lens).abs() < 1e-8, "x={x}: {direct} vs {lens}");
        }
    }

    #[test]
    fn identity_at_half_time() {
        let fam = HighpFamily::new(1, 32.0).unwrap();
        for x in [-0.7, 0.05, 0.4] {
            let a = fam.evolved_half(&[x]).unwrap();
            let b = fam.dilated_ring(f64::abs(x)).unwrap();
            assert!((a - b).norm() < 1e-8 * fam.lambda, "{a} vs {b}");
        }
    }
}
