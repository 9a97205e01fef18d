//! Radial families in n = 2, 3. The annulus f̂_k = η_ann(|ξ|/2^k) has a
//! stationary point at r = 2^{k+3/2} when t_x = |x|/2^{k+5/2}, giving
//! |e^{it_xΔ}f_k(x)| ≳ 2^{nk/2}. The thin annulus of width 2^{k/2} around
//! 2^k does the same at t_x = |x|/2^{k+1} with a smaller norm for p ≥ 2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bumps::BumpLibrary;
use super::x_grid_half;
use crate::error::{LabError, Result};
use crate::numerics::{integrate_oscillatory_with, GridSpec, OscillatoryOptions, PolyPhase};
use crate::propagator::{evolve_radial, maximal_over_time, Evaluator, TimeGrid};
use crate::report::{Comparison, ExperimentReport, Record};
use crate::spaces::{bessel_potential_norm, ProfileKind, SpectralProfile, Support};
use crate::special::{sphere_ft_split, sphere_split_coefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnnulusKind {
    /// η_ann(|ξ|/2^k), support 2^k ≤ |ξ| ≤ 2^{k+2}.
    Wide,
    /// η_unit((|ξ| − 2^k)/2^{k/2}).
    Thin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusFamily {
    pub n: usize,
    pub k: u32,
    pub kind: AnnulusKind,
}

impl AnnulusFamily {
    pub fn new(n: usize, k: u32, kind: AnnulusKind) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(LabError::UnsupportedDimension(n));
        }
        if k < 1 || k > 30 {
            return Err(LabError::OutOfRange(format!("k must be in 1..=30, got {k}")));
        }
        Ok(Self { n, k, kind })
    }

    fn scale(&self) -> f64 {
        (self.k as f64).exp2()
    }

    pub fn profile(&self) -> Result<SpectralProfile> {
        let scale = self.scale();
        match self.kind {
            AnnulusKind::Wide => SpectralProfile::radial(
                self.n,
                move |r| Complex64::new(BumpLibrary::eta_ann(r / scale), 0.0),
                Support::Annulus {
                    inner: scale,
                    outer: 4.0 * scale,
                },
            ),
            AnnulusKind::Thin => {
                let width = scale.sqrt();
                SpectralProfile::radial(
                    self.n,
                    move |r| Complex64::new(BumpLibrary::eta_unit((r - scale) / width), 0.0),
                    Support::Annulus {
                        inner: scale - width,
                        outer: scale + width,
                    },
                )
            }
        }
    }

    pub fn t_x(&self, xnorm: f64) -> f64 {
        match self.kind {
            AnnulusKind::Wide => xnorm / (self.k as f64 + 2.5).exp2(),
            AnnulusKind::Thin => xnorm / (self.k as f64 + 1.0).exp2(),
        }
    }

    /// ‖f_k‖_{L^p_s} through the profile rescaled to unit frequency:
    /// f_k(x) = 2^{kn}F(2^k x), so ‖f_k‖ = 2^{kn(1−1/p)}‖ℱ⁻¹g‖_p with
    /// g(ν) = f̂_k(2^kν)(1+4^k|ν|²)^{s/2}.
    pub fn norm(&self, p: f64, s: f64) -> Result<f64> {
        let n = self.n;
        let scale = self.scale();
        let (g, support, reach): (Box<dyn Fn(f64) -> f64 + Send + Sync>, Support, f64) = match self.kind {
            AnnulusKind::Wide => (
                // (1+4^k r²)^{s/2} = 2^{ks}(4^{−k}+r²)^{s/2}; the 2^{ks} is put back below.
                Box::new(move |r| BumpLibrary::eta_ann(r) * (1.0 / (scale * scale) + r * r).powf(0.5 * s)),
                Support::Annulus { inner: 1.0, outer: 4.0 },
                64.0,
            ),
            AnnulusKind::Thin => {
                let width = 1.0 / scale.sqrt();
                (
                    Box::new(move |r| {
                        BumpLibrary::eta_unit((r - 1.0) / width) * (1.0 / (scale * scale) + r * r).powf(0.5 * s)
                    }),
                    Support::Annulus {
                        inner: 1.0 - width,
                        outer: 1.0 + width,
                    },
                    // The spatial envelope spreads over |y| ~ 1/width.
                    48.0 / width,
                )
            }
        };
        let profile = SpectralProfile::radial(n, move |r| Complex64::new(g(r), 0.0), support)?;
        let step = 0.05;
        let grid = GridSpec::new(vec![(0.0, reach)], vec![(reach / step).round() as usize + 1])?;
        let base = bessel_potential_norm(&profile, 0.0, p, &grid)?;
        let n = n as f64;
        Ok((self.k as f64 * (n * (1.0 - 1.0 / p) + s)).exp2() * base)
    }
}

/// The three pieces of the radial integral after splitting
/// dσ̂(ρ) = ρ^{−(n−1)/2}(C₁e^{iρ} + C₂e^{−iρ}) + remainder:
/// `stationary` carries C₁e^{iρ}, `conjugate` C₂e^{−iρ}, `remainder` the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSplit {
    pub stationary: Complex64,
    pub conjugate: Complex64,
    pub remainder: Complex64,
}

impl RadialSplit {
    pub fn total(&self) -> Complex64 {
        self.stationary + self.conjugate + self.remainder
    }
}

/// Needs inner radius·|x| ≥ 1 so the split applies on the whole support.
pub fn radial_split(profile: &SpectralProfile, t: f64, xnorm: f64) -> Result<RadialSplit> {
    let ProfileKind::Radial(g) = &profile.kind else {
        return Err(LabError::InvalidInput("split needs a radial profile".into()));
    };
    let n = profile.dimension;
    let (lo, hi) = (profile.support.inner_radius(), profile.support.outer_radius());
    if !(lo * xnorm >= 1.0) {
        return Err(LabError::DomainError(format!(
            "split needs r|x| >= 1 on the support, got {}",
            lo * xnorm
        )));
    }
    let (c1, c2) = sphere_split_coefficients(n);
    let m = 0.5 * (n as f64 - 1.0);
    let c = profile.chirp - t;
    let norm = (2.0 * PI).powi(-(n as i32));
    let envelope = |r: f64| g(r) * r.powi(n as i32 - 1);
    let mass: f64 = {
        let cells = 512;
        let h = (hi - lo) / cells as f64;
        (0..cells).map(|i| envelope(lo + (i as f64 + 0.5) * h).norm() * h).sum()
    };
    let tol = 1e-11 * mass;
    let opts = OscillatoryOptions::absolute(tol);
    let wave = |sign: f64, coef: Complex64| -> Result<Complex64> {
        let phase = PolyPhase::new(vec![0.0, sign * xnorm, c]);
        let q = integrate_oscillatory_with(
            &phase,
            |r| envelope(r) * coef * (r * xnorm).powf(-m),
            1.0,
            (lo, hi),
            &opts,
        )?;
        Ok(q.value * norm)
    };
    let stationary = wave(1.0, c1)?;
    let conjugate = wave(-1.0, c2)?;
    let phase = PolyPhase::new(vec![0.0, 0.0, c]);
    let rest = integrate_oscillatory_with(
        &phase,
        |r| envelope(r) * sphere_ft_split(n, r * xnorm).map(|sp| sp.remainder).unwrap_or(f64::NAN),
        1.0,
        (lo, hi),
        &opts.clone().with_amplitude_rate(xnorm),
    )?;
    Ok(RadialSplit {
        stationary,
        conjugate,
        remainder: rest.value * norm,
    })
}

/// Times t_x·2^{u}, u ∈ [−2, 2] in 17 steps, plus t_x itself.
fn window_around(t_x: f64) -> Result<TimeGrid> {
    let times = (0..17).map(|i| t_x * (-2.0 + 0.25 * i as f64).exp2()).filter(|&t| t < 1.0).collect();
    TimeGrid::new(times)?.with_injected(vec![t_x])
}

fn slope_tolerance(n: usize) -> f64 {
    if n == 3 {
        0.15
    } else {
        0.1
    }
}

fn blowup_sweep(report: &mut ExperimentReport, fam: &AnnulusFamily) -> Result<()> {
    let profile = fam.profile()?;
    profile.check_support(400)?;
    let xs = x_grid_half();
    let values: Vec<f64> = xs
        .par_iter()
        .map(|&x| evolve_radial(&profile, fam.t_x(x), x).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = (fam.k as f64).exp2();
    report.push(Record::new("blowup", scale, min).with_argmax(fam.t_x(xs[0])));
    // Near-maximizer check at |x| = 3/4 over a window around t_x.
    let x = 0.75;
    let t_x = fam.t_x(x);
    let m = maximal_over_time(Evaluator::Radial, &profile, &[x], &window_around(t_x)?)?;
    let at_t_x = evolve_radial(&profile, t_x, x)?.norm();
    report.push(Record::new("argmax_over_t_x", scale, m.argmax_t / t_x).with_argmax(m.argmax_t));
    report.push(Record::new("value_at_t_x_over_max", scale, at_t_x / m.value));
    Ok(())
}

/// Blow-up slope (n/2), norm slope s + n(1 − 1/p), and the split with the
/// stationary piece isolated: the other two grow at most like 2^{k(n−1)/2}.
pub fn annulus_experiment(n: usize, p: f64, s: f64, k_sweep: &[u32]) -> Result<ExperimentReport> {
    if k_sweep.len() < 3 {
        return Err(LabError::DegenerateSweep(format!("{} sweep points, need 3", k_sweep.len())));
    }
    let mut report = ExperimentReport::new("counterexample:annulus");
    report.echo("n", n).echo("p", p).echo("s", s);
    let tol = slope_tolerance(n);
    let mut split_error = 0.0f64;
    for &k in k_sweep {
        let fam = AnnulusFamily::new(n, k, AnnulusKind::Wide)?;
        blowup_sweep(&mut report, &fam)?;
        let scale = (k as f64).exp2();
        report.push(Record::new("norm", scale, fam.norm(p, s)?));
        let profile = fam.profile()?;
        let xs: Vec<f64> = x_grid_half().into_iter().step_by(4).collect();
        let splits: Vec<(RadialSplit, Complex64)> = xs
            .par_iter()
            .map(|&x| {
                let t = fam.t_x(x);
                Ok((radial_split(&profile, t, x)?, evolve_radial(&profile, t, x)?))
            })
            .collect::<Result<_>>()?;
        let mut conj = 0.0f64;
        let mut rem = 0.0f64;
        for (sp, full) in &splits {
            split_error = split_error.max((sp.total() - full).norm() / full.norm());
            conj = conj.max(sp.conjugate.norm());
            rem = rem.max(sp.remainder.norm());
        }
        report.push(Record::new("I2", scale, conj));
        report.push(Record::new("I3", scale, rem));
    }
    let nf = n as f64;
    report.slope_claim("blow-up slope", "blowup", 0.5 * nf, Comparison::Within, tol)?;
    report.slope_claim("norm slope", "norm", s + nf * (1.0 - 1.0 / p), Comparison::Within, tol)?;
    report.slope_claim("I2 slope", "I2", 0.5 * (nf - 1.0), Comparison::AtMost, tol)?;
    report.slope_claim("I3 slope", "I3", 0.5 * (nf - 1.0), Comparison::AtMost, tol)?;
    report.check("split reproduces radial integral", split_error, 0.0, Comparison::AtMost, 1e-6);
    near_maximizer_checks(&mut report);
    Ok(report)
}

/// At the largest k, t_x is within a factor 2 of the windowed argmax and
/// attains at least half the windowed maximum.
fn near_maximizer_checks(report: &mut ExperimentReport) {
    let last = |q: &str| report.series(q).last().map(|&(_, v)| v).unwrap_or(f64::NAN);
    let ratio = last("argmax_over_t_x");
    let share = last("value_at_t_x_over_max");
    report.check("argmax within factor 2 of t_x (largest k)", ratio.log2().abs(), 0.0, Comparison::AtMost, 1.0);
    report.check("value at t_x >= half the max (largest k)", share, 0.5, Comparison::AtLeast, 0.0);
}

/// Blow-up slope n/2 and the one-sided norm bound ‖f_k‖_{L^p_s} ≲
/// 2^{k(s + (n−1/2)/p')}: fitted slope at most the exponent, and the ratio to
/// the bound grows by at most a factor 2 across the sweep.
pub fn thin_annulus_experiment(n: usize, p: f64, s: f64, k_sweep: &[u32]) -> Result<ExperimentReport> {
    if k_sweep.len() < 3 {
        return Err(LabError::DegenerateSweep(format!("{} sweep points, need 3", k_sweep.len())));
    }
    if !(p >= 2.0) {
        return Err(LabError::OutOfRange(format!("thin annulus needs p >= 2, got {p}")));
    }
    let mut report = ExperimentReport::new("counterexample:thin-annulus");
    report.echo("n", n).echo("p", p).echo("s", s);
    let tol = slope_tolerance(n);
    let nf = n as f64;
    let p_dual = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let exponent = s + (nf - 0.5) / p_dual;
    for &k in k_sweep {
        let fam = AnnulusFamily::new(n, k, AnnulusKind::Thin)?;
        blowup_sweep(&mut report, &fam)?;
        let scale = (k as f64).exp2();
        let norm = fam.norm(p, s)?;
        report.push(Record::new("norm", scale, norm));
        report.push(Record::new("norm_over_bound", scale, norm / scale.powf(exponent)));
    }
    report.slope_claim("blow-up slope", "blowup", 0.5 * nf, Comparison::Within, tol)?;
    report.slope_claim("norm slope (upper bound)", "norm", exponent, Comparison::AtMost, tol)?;
    let ratios = report.series("norm_over_bound");
    let first = ratios[0].1;
    let worst = ratios.iter().map(|&(_, r)| r / first).fold(f64::MIN, f64::max);
    report.check("norm ratio to bound stays bounded", worst, 1.0, Comparison::AtMost, 1.0);
    near_maximizer_checks(&mut report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_exact() {
        for n in [2, 3] {
            let fam = AnnulusFamily::new(n, 4, AnnulusKind::Wide).unwrap();
            let prof = fam.profile().unwrap();
            for x in [0.5, 0.8] {
                let t = fam.t_x(x);
                let sp = radial_split(&prof, t, x).unwrap();
                let full = evolve_radial(&prof, t, x).unwrap();
                assert!((sp.total() - full).norm() < 1e-8 * full.norm(), "n={n}");
                assert!(sp.stationary.norm() > sp.conjugate.norm());
            }
        }
    }

    #[test]
    fn stationary_radius_matches_peak() {
        let fam = AnnulusFamily::new(2, 5, AnnulusKind::Wide).unwrap();
        // r* = |x|/(2t_x) = 2^{k+3/2}, where η_ann(r/2^k) = 1.
        let r_star = 0.7 / (2.0 * fam.t_x(0.7));
        assert!((BumpLibrary::eta_ann(r_star / 32.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_matches_plancherel() {
        // ‖f‖₂ = (2π)^{−1}(∫|f̂|²)^{1/2} in n = 2.
        let fam = AnnulusFamily::new(2, 3, AnnulusKind::Wide).unwrap();
        let got = fam.norm(2.0, 0.0).unwrap();
        let want = crate::numerics::integrate_adaptive(
            |r| Complex64::new(BumpLibrary::eta_ann(r / 8.0).powi(2) * 2.0 * PI * r, 0.0),
            8.0,
            32.0,
            1e-10,
        )
        .unwrap()
        .value
        .re
        .sqrt()
            / (2.0 * PI);
        assert!((got / want - 1.0).abs() < 1e-5, "{got} vs {want}");
    }
}
