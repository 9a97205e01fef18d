//! L^∞ endpoint. For |y| → ∞, K_{s,t₀}(−y) ≈ c₁|y|^{−s}e^{i|y|²/(4t₀)}, so the
//! bounded datum f_s(y) = e^{−i|y|²/(4t₀)}·sgn(c̄₁) on |y| > R makes
//! ∫K_{s,t₀}(−y)f_s(y) dy diverge like R'^{n−s} (log R' when s = n).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::{integrate_panels, least_squares, QuadratureOptions};
use crate::propagator::{kernel_k_with, KernelOptions};
use crate::report::{Comparison, ExperimentReport, Record};
use crate::special::sphere_measure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinftyEndpoint {
    pub n: usize,
    pub s: f64,
    pub t0: f64,
    pub r: f64,
    pub c1: Complex64,
}

/// c₁ = 2^{s−n} t₀^{s−n/2} π^{−n/2} e^{−iπn/4}.
pub fn leading_coefficient(n: usize, s: f64, t0: f64) -> Complex64 {
    let nf = n as f64;
    let modulus = (s - nf).exp2() * t0.powf(s - 0.5 * nf) * PI.powf(-0.5 * nf);
    Complex64::from_polar(modulus, -0.25 * PI * nf)
}

/// Samples per [R, 2R] used by the margin criterion.
const MARGIN_SAMPLES: usize = 17;

impl LinftyEndpoint {
    /// With `r = None`, R doubles from 1 until the margin holds on [R, 2R].
    pub fn new(n: usize, s: f64, t0: f64, r: Option<f64>) -> Result<Self> {
        sphere_measure(n)?;
        if !(s > 0.0 && s <= n as f64) {
            return Err(LabError::OutOfRange(format!("s must be in (0, {n}], got {s}")));
        }
        if !(t0 > 0.0 && t0 < 1.0) {
            return Err(LabError::OutOfRange(format!("t0 must be in (0, 1), got {t0}")));
        }
        let c1 = leading_coefficient(n, s, t0);
        let mut me = Self { n, s, t0, r: 1.0, c1 };
        match r {
            Some(r) => {
                me.r = r;
                let m = me.margin_on(r, 2.0 * r)?;
                if m < 0.5 {
                    return Err(LabError::HypothesisViolation(format!(
                        "margin {m} < 1/2 on [{r}, {}]",
                        2.0 * r
                    )));
                }
            }
            None => {
                while me.margin_on(me.r, 2.0 * me.r)? < 0.5 {
                    me.r *= 2.0;
                    if me.r > 64.0 {
                        return Err(LabError::NotFound("no R <= 64 meets the margin".into()));
                    }
                }
            }
        }
        Ok(me)
    }

    /// The datum f_s at radius |y| > R.
    pub fn datum(&self, y: f64) -> Complex64 {
        let sign = self.c1.conj() / self.c1.norm();
        Complex64::from_polar(1.0, -(y * y / (4.0 * self.t0)).rem_euclid(2.0 * PI)) * sign
    }

    /// K_{s,t₀}(−y e₁)·f_s(y).
    pub fn integrand(&self, y: f64) -> Result<Complex64> {
        let mut z = vec![0.0; self.n];
        z[0] = -y;
        let opts = KernelOptions {
            rel_tol: 1e-10,
            ..KernelOptions::default()
        };
        Ok(kernel_k_with(self.s, self.t0, &z, self.n, &opts)?.value * self.datum(y))
    }

    /// Re(K f_s)/(|c₁||y|^{−s}), minimized over samples of [a, b].
    pub fn margin_on(&self, a: f64, b: f64) -> Result<f64> {
        let ys: Vec<f64> = (0..MARGIN_SAMPLES)
            .map(|i| a + (b - a) * i as f64 / (MARGIN_SAMPLES - 1) as f64)
            .collect();
        let margins: Vec<f64> = ys
            .par_iter()
            .map(|&y| Ok(self.integrand(y)?.re / (self.c1.norm() * y.powf(-self.s))))
            .collect::<Result<_>>()?;
        Ok(margins.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// K(−y)|y|^s e^{−i|y|²/(4t₀)}, which tends to c₁.
    pub fn coefficient_at(&self, y: f64) -> Result<Complex64> {
        let mut z = vec![0.0; self.n];
        z[0] = -y;
        let opts = KernelOptions {
            rel_tol: 1e-10,
            ..KernelOptions::default()
        };
        let k = kernel_k_with(self.s, self.t0, &z, self.n, &opts)?.value;
        Ok(k * y.powf(self.s) * Complex64::from_polar(1.0, -(y * y / (4.0 * self.t0)).rem_euclid(2.0 * PI)))
    }

    /// ∫_{a ≤ |y| ≤ b} K(−y)f_s(y) dy, radially reduced.
    pub fn shell_integral(&self, a: f64, b: f64) -> Result<Complex64> {
        let measure = sphere_measure(self.n)?;
        let scale = self.c1.norm() * measure * b.powf(self.n as f64 - self.s);
        let breaks: Vec<f64> = (0..=4).map(|i| a + (b - a) * i as f64 / 4.0).collect();
        let n = self.n;
        let f = |y: f64| {
            self.integrand(y)
                .map(|v| v * y.powi(n as i32 - 1))
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        let q = integrate_panels(&f, &breaks, &QuadratureOptions::absolute(1e-7 * scale))?;
        if !q.value.re.is_finite() {
            return Err(LabError::NonConvergence {
                value_re: q.value.re,
                value_im: q.value.im,
                error_estimate: q.error_estimate,
            });
        }
        Ok(q.value * measure)
    }
}

/// Coefficient check at the largest |y| of `coefficient_radii`, and the
/// growth of P(R') = ∫_{R ≤ |y| ≤ R'} K f_s over a geometric R' sweep.
pub fn linfty_divergence_experiment(
    n: usize,
    s: f64,
    t0: f64,
    r: Option<f64>,
    r_prime_sweep: &[f64],
) -> Result<ExperimentReport> {
    linfty_divergence_experiment_with(n, s, t0, r, r_prime_sweep, &[8.0, 16.0, 32.0, 64.0])
}

pub fn linfty_divergence_experiment_with(
    n: usize,
    s: f64,
    t0: f64,
    r: Option<f64>,
    r_prime_sweep: &[f64],
    coefficient_radii: &[f64],
) -> Result<ExperimentReport> {
    if r_prime_sweep.len() < 3 {
        return Err(LabError::DegenerateSweep(format!("{} sweep points, need 3", r_prime_sweep.len())));
    }
    let mut sweep = r_prime_sweep.to_vec();
    sweep.sort_by(f64::total_cmp);
    let ratio = sweep[1] / sweep[0];
    if !(ratio > 1.0) || sweep.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9) {
        return Err(LabError::DegenerateSweep("R' sweep must be geometric and increasing".into()));
    }
    let end = LinftyEndpoint::new(n, s, t0, r)?;
    if sweep[0] <= end.r {
        return Err(LabError::DegenerateSweep(format!("R' sweep must start above R = {}", end.r)));
    }
    let mut report = ExperimentReport::new("counterexample:linfty");
    report
        .echo("n", n)
        .echo("s", s)
        .echo("t0", t0)
        .echo("R", end.r)
        .echo("c1_re", end.c1.re)
        .echo("c1_im", end.c1.im);

    let mut worst_coef = 0.0;
    for &y in coefficient_radii {
        let err = (end.coefficient_at(y)? - end.c1).norm() / end.c1.norm();
        report.push(Record::new("coefficient_error", y, err));
        worst_coef = err;
    }
    let bounds: Vec<(f64, f64)> = std::iter::once(end.r)
        .chain(sweep.iter().cloned())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[0], w[1]))
        .collect();
    let pieces: Vec<Complex64> = bounds
        .par_iter()
        .map(|&(a, b)| end.shell_integral(a, b))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut partial = Vec::new();
    for (i, (&(a, b), piece)) in bounds.iter().zip(&pieces).enumerate() {
        total += piece.re;
        partial.push((b, total));
        report.push(Record::new("partial_integral", b, total));
        // The first piece starts at R rather than at R'/ratio.
        if i > 0 || (b / a - ratio).abs() < 1e-9 {
            report.push(Record::new("shell_increment", b, piece.re));
        }
        report.push(Record::new("margin", b, end.margin_on(a, b)?));
    }
    report.check(
        "leading coefficient relative error at largest |y|",
        worst_coef,
        0.0,
        Comparison::AtMost,
        0.05,
    );
    let min_margin = report.series("margin").iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    report.check("margin >= 1/2 on every shell", min_margin, 0.5, Comparison::AtLeast, 0.0);
    let nf = n as f64;
    if s < nf {
        report.slope_claim("partial integral growth slope", "shell_increment", nf - s, Comparison::Within, 0.1)?;
    } else {
        let pts: Vec<(f64, f64)> = partial.iter().map(|&(b, p)| (b.ln(), p)).collect();
        let (slope, intercept) = least_squares(&pts)?;
        let range = pts.iter().map(|p| p.1).fold(f64::MIN, f64::max) - pts.iter().map(|p| p.1).fold(f64::MAX, f64::min);
        let worst = pts
            .iter()
            .map(|&(x, y)| (y - (slope * x + intercept)).abs())
            .fold(0.0, f64::max);
        report.echo("semi_log_slope", slope);
        report.check("log growth: semi-log residual / range", worst / range, 0.0, Comparison::AtMost, 0.05);
        report.check("log growth: positive semi-log slope", slope, 0.0, Comparison::AtLeast, 0.0);
    }
    Ok(report)
}
