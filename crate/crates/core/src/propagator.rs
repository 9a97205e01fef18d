//! e^{itΔ}f(x) = (2π)^{−n}∫ e^{ix·ξ − it|ξ|²} f̂(ξ) dξ by direct, radial and
//! grid routes; the kernel K_{s,t} of (1−Δ)^{−s/2}e^{itΔ} through rescaled
//! dyadic pieces; and maxima over finite time grids.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::{
    dft_forward, dft_inverse, integrate_oscillatory_with, GridSpec, OscillatoryOptions, PolyPhase, SampledField,
};
use crate::report::{Comparison, ExperimentReport, Record};
use crate::smooth::plateau;
use crate::spaces::{radial_inverse, SpectralProfile, Support};
use crate::special::{sphere_ft_any, sphere_measure};

/// Sorted, deduplicated times in (0, 1) plus optional analytic candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub times: Vec<f64>,
    pub injected_points: Vec<f64>,
}

fn normalize_times(mut times: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(&bad) = times.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(LabError::OutOfRange(format!("times must lie in (0, 1), got {bad}")));
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    Ok(times)
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        Ok(Self {
            times: normalize_times(times)?,
            injected_points: Vec::new(),
        })
    }

    /// `count` log-spaced points strictly inside (2^{lo}, 1).
    pub fn log_spaced(lo_exp: f64, count: usize) -> Result<Self> {
        let times = (1..=count)
            .map(|i| (lo_exp * (1.0 - i as f64 / (count + 1) as f64)).exp2())
            .collect();
        Self::new(times)
    }

    /// 64 log-spaced points in (2^{−20}, 1).
    pub fn default_log() -> Self {
        Self::log_spaced(-20.0, 64).expect("static grid is valid")
    }

    /// Adds the geometric midpoint of every neighbouring pair.
    pub fn refined(&self) -> Self {
        let mut times = self.times.clone();
        times.extend(self.times.windows(2).map(|w| (w[0] * w[1]).sqrt()));
        Self {
            times: normalize_times(times).expect("midpoints stay in (0, 1)"),
            injected_points: self.injected_points.clone(),
        }
    }

    pub fn with_injected(&self, points: Vec<f64>) -> Result<Self> {
        Ok(Self {
            times: self.times.clone(),
            injected_points: normalize_times(points)?,
        })
    }

    /// Grid and injected times, merged and sorted.
    pub fn all_times(&self) -> Vec<f64> {
        let mut all = self.times.clone();
        all.extend(&self.injected_points);
        normalize_times(all).expect("validated on construction")
    }
}

/// Radial partition of unity for the kernel: ψ is 1 on |η| ≤ 2 and 0 beyond
/// 4, ρ is 1 on |η| ≤ 1/3 and 0 beyond 2/3. β₀ = ρ, β_* = ψ(1−ρ),
/// β_j = ψ(η/2^j) − ψ(η/2^{j−1}), so β₀ + β_* + Σ_{j≤J} β_j = ψ(η/2^J).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicCutoffs {
    pub psi_plateau: f64,
    pub psi_support: f64,
    pub rho_plateau: f64,
    pub rho_support: f64,
}

impl Default for DyadicCutoffs {
    fn default() -> Self {
        Self {
            psi_plateau: 2.0,
            psi_support: 4.0,
            rho_plateau: 1.0 / 3.0,
            rho_support: 2.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Piece {
    Zero,
    Star,
    Shell(u32),
}

impl DyadicCutoffs {
    pub fn psi(&self, r: f64) -> f64 {
        plateau(r, self.psi_plateau, self.psi_support)
    }

    pub fn rho(&self, r: f64) -> f64 {
        plateau(r, self.rho_plateau, self.rho_support)
    }

    pub fn beta(&self, piece: Piece, r: f64) -> f64 {
        match piece {
            Piece::Zero => self.rho(r),
            Piece::Star => self.psi(r) * (1.0 - self.rho(r)),
            Piece::Shell(j) => {
                let s = (j as f64).exp2();
                self.psi(r / s) - self.psi(2.0 * r / s)
            }
        }
    }

    /// Radial interval outside which the piece vanishes.
    pub fn support(&self, piece: Piece) -> (f64, f64) {
        match piece {
            Piece::Zero => (0.0, self.rho_support),
            Piece::Star => (self.rho_plateau, self.psi_support),
            Piece::Shell(j) => {
                let s = (j as f64).exp2();
                (0.5 * s * self.psi_plateau, s * self.psi_support)
            }
        }
    }

    /// Largest deviation of β₀ + β_* + Σ_{j≤J} β_j from 1 on |η| ≤ 2^{J+1},
    /// sampling `per_shell` points in each dyadic shell.
    pub fn partition_error(&self, shells: u32, per_shell: usize) -> f64 {
        let mut worst = 0.0f64;
        for octave in -4..=(shells as i32) {
            let (lo, hi) = ((octave as f64).exp2(), (octave as f64 + 1.0).exp2());
            for i in 0..per_shell {
                let r = lo + (hi - lo) * i as f64 / per_shell as f64;
                let mut sum = self.beta(Piece::Zero, r) + self.beta(Piece::Star, r);
                for j in 1..=shells {
                    sum += self.beta(Piece::Shell(j), r);
                }
                worst = worst.max((sum - 1.0).abs());
            }
        }
        worst
    }
}

/// Absolute tolerance equal to `rel_tol` times a coarse midpoint estimate of
/// ∫|amp| over `[lo, hi]`.
fn mass_tolerance<A: Fn(f64) -> f64>(bound: A, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let cells = 256;
    let h = (hi - lo) / cells as f64;
    let mass: f64 = (0..cells).map(|i| bound(lo + (i as f64 + 0.5) * h).abs() * h).sum();
    (rel_tol * mass).max(1e-300)
}

/// e^{itΔ}f(x) by direct quadrature. One dimension: a single oscillatory
/// integral; two dimensions: iterated oscillatory integrals over the support
/// box; radial three-dimensional profiles go through [`evolve_radial`].
pub fn evolve_spectral(profile: &SpectralProfile, t: f64, x: &[f64]) -> Result<Complex64> {
    evolve_spectral_with(profile, t, x, 1e-10)
}

pub fn evolve_spectral_with(profile: &SpectralProfile, t: f64, x: &[f64], rel_tol: f64) -> Result<Complex64> {
    let n = profile.dimension;
    if x.len() != n {
        return Err(LabError::InvalidInput(format!("point has {} coordinates, expected {n}", x.len())));
    }
    let c = profile.chirp - t;
    match n {
        1 => {
            let (lo, hi) = profile.support_box()[0];
            let tol = mass_tolerance(|u| profile.base(&[u]).norm(), lo, hi, rel_tol);
            let phase = PolyPhase::new(vec![0.0, x[0], c]);
            let q = integrate_oscillatory_with(
                &phase,
                |u| profile.base(&[u]),
                1.0,
                (lo, hi),
                &OscillatoryOptions::absolute(tol),
            )?;
            Ok(q.value / (2.0 * PI))
        }
        2 => {
            let bx = profile.support_box();
            let (lo1, hi1) = bx[0];
            let (lo2, hi2) = bx[1];
            let mass_line = |u: f64| {
                let h = (hi2 - lo2) / 64.0;
                (0..64).map(|i| profile.base(&[u, lo2 + (i as f64 + 0.5) * h]).norm() * h).sum::<f64>()
            };
            let tol = mass_tolerance(mass_line, lo1, hi1, rel_tol);
            let inner_tol = tol / (hi1 - lo1);
            let inner_phase = PolyPhase::new(vec![0.0, x[1], c]);
            let outer_phase = PolyPhase::new(vec![0.0, x[0], c]);
            let failure: RefCell<Option<LabError>> = RefCell::new(None);
            let line = |u: f64| -> Complex64 {
                match integrate_oscillatory_with(
                    &inner_phase,
                    |v| profile.base(&[u, v]),
                    1.0,
                    (lo2, hi2),
                    &OscillatoryOptions::absolute(inner_tol),
                ) {
                    Ok(q) => q.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            };
            let q = integrate_oscillatory_with(&outer_phase, line, 1.0, (lo1, hi1), &OscillatoryOptions::absolute(tol))?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(q.value / (4.0 * PI * PI))
        }
        3 if profile.is_radial() => evolve_radial(profile, t, x.iter().map(|v| v * v).sum::<f64>().sqrt()),
        _ => Err(LabError::UnsupportedDimension(n)),
    }
}

/// Radial reduction (2π)^{−n}∫ e^{−itr²} g(r) r^{n−1} dσ̂(r|x|) dr.
pub fn evolve_radial(profile: &SpectralProfile, t: f64, xnorm: f64) -> Result<Complex64> {
    evolve_radial_with(profile, t, xnorm, 1e-10)
}

pub fn evolve_radial_with(profile: &SpectralProfile, t: f64, xnorm: f64, rel_tol: f64) -> Result<Complex64> {
    if !profile.is_radial() {
        return Err(LabError::InvalidInput("radial evolution needs a radial profile".into()));
    }
    if !(xnorm >= 0.0) {
        return Err(LabError::InvalidInput(format!("|x| must be non-negative, got {xnorm}")));
    }
    let shifted = profile.clone().with_chirp(profile.chirp - t);
    radial_inverse(&shifted, xnorm, rel_tol)
}

/// Periodized evolution on the grid: DFT, multiply by e^{−it|ξ|²}, inverse
/// DFT. Aliasing is controlled by refusing fields whose spectrum reaches the
/// top octave of grid frequencies.
pub fn evolve_grid(field: &SampledField, t: f64) -> Result<SampledField> {
    let n = field.grid.dimension();
    let spectrum = dft_forward(field)?;
    let nyquist: Vec<f64> = (0..n)
        .map(|axis| 0.5 * field.grid.counts[axis] as f64 * spectrum.grid.spacing(axis))
        .collect();
    let mut total = 0.0;
    let mut top = 0.0;
    for (flat, v) in spectrum.values.iter().enumerate() {
        let xi = spectrum.grid.point(flat);
        let w = v.norm_sqr();
        total += w;
        if (0..n).any(|axis| xi[axis].abs() > 0.5 * nyquist[axis]) {
            top += w;
        }
    }
    if total > 0.0 && top > 1e-8 * total {
        return Err(LabError::BandLimitViolation { fraction: top / total });
    }
    let mut evolved = spectrum;
    for (flat, v) in evolved.values.iter_mut().enumerate() {
        let xi = evolved.grid.point(flat);
        let r2: f64 = xi[..n].iter().map(|u| u * u).sum();
        *v *= Complex64::from_polar(1.0, -t * r2);
    }
    dft_inverse(&evolved)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    pub rel_tol: f64,
    /// Largest shell index J the dyadic sum may reach.
    pub shell_cap: u32,
    pub cutoffs: DyadicCutoffs,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            shell_cap: 40,
            cutoffs: DyadicCutoffs::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub zero: Complex64,
    pub star: Complex64,
    pub shells: Vec<Complex64>,
    /// λ = |z|²/(2t).
    pub lambda: f64,
}

/// Shells are summed until one lies in the non-stationary regime
/// λ·4^j ≥ 256 and is below tolerance; past that point the pieces decay
/// faster than any power of 2^{−j}.
const SHELL_REGIME: f64 = 256.0;

/// K_{s,t}(z) = (2π)^{−n}∫ e^{i(z·ξ − t|ξ|²)}(1+|ξ|²)^{−s/2} dξ, n ∈ {1, 2, 3}.
pub fn kernel_k(s: f64, t: f64, z: &[f64], n: usize) -> Result<Complex64> {
    Ok(kernel_k_with(s, t, z, n, &KernelOptions::default())?.value)
}

/// Evaluated in the variables η = 2tξ/|z|, λ = |z|²/(2t), a = |z|/(2t):
/// K = (2π)^{−n} aⁿ ∫_0^∞ β(r) e^{−iλr²/2}(1+a²r²)^{−s/2} r^{n−1} dσ̂(λr) dr,
/// summed over β ∈ {β₀, β_*, β₁, …}.
pub fn kernel_k_with(s: f64, t: f64, z: &[f64], n: usize, opts: &KernelOptions) -> Result<KernelValue> {
    if !(s > 0.0) {
        return Err(LabError::OutOfRange(format!("kernel needs s > 0, got {s}")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(LabError::OutOfRange(format!("kernel needs t in (0, 1), got {t}")));
    }
    if z.len() != n {
        return Err(LabError::InvalidInput(format!("point has {} coordinates, expected {n}", z.len())));
    }
    sphere_measure(n)?;
    let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(zn > 0.0) {
        return Err(LabError::InvalidInput("kernel is evaluated at z != 0".into()));
    }
    let lambda = zn * zn / (2.0 * t);
    let a = zn / (2.0 * t);
    let prefactor = (2.0 * PI).powi(-(n as i32)) * a.powi(n as i32);
    let cut = opts.cutoffs;
    let measure = sphere_measure(n)?;
    let phase = PolyPhase::new(vec![0.0, 0.0, -0.5]);
    let piece = |p: Piece| -> Result<(Complex64, f64)> {
        let (lo, hi) = cut.support(p);
        let envelope = |r: f64| cut.beta(p, r) * (1.0 + a * a * r * r).powf(-0.5 * s) * r.powi(n as i32 - 1);
        let tol = mass_tolerance(|r| envelope(r) * measure, lo, hi, opts.rel_tol);
        let amp = |r: f64| Complex64::new(envelope(r) * sphere_ft_any(n, lambda * r).unwrap_or(f64::NAN), 0.0);
        let q = integrate_oscillatory_with(
            &phase,
            amp,
            lambda,
            (lo, hi),
            &OscillatoryOptions::absolute(tol).with_amplitude_rate(lambda),
        )?;
        Ok((q.value * prefactor, tol * prefactor))
    };
    let (zero, _) = piece(Piece::Zero)?;
    let (star, _) = piece(Piece::Star)?;
    let mut total = zero + star;
    let mut shells = Vec::new();
    let mut j = 1;
    loop {
        if j > opts.shell_cap {
            return Err(LabError::TailBudgetExceeded {
                needed: j as usize,
                cap: opts.shell_cap as usize,
            });
        }
        let (v, tol) = piece(Piece::Shell(j))?;
        shells.push(v);
        total += v;
        let settled = lambda * (4f64).powi(j as i32) >= SHELL_REGIME
            && v.norm() <= (opts.rel_tol * total.norm()).max(4.0 * tol);
        if settled {
            break;
        }
        j += 1;
    }
    Ok(KernelValue {
        value: total,
        zero,
        star,
        shells,
        lambda,
    })
}

/// Kernel sups skip times with λ = |z|²/(2t) above this value. The β_*
/// piece then costs O(λ) panels; for the s-range in question the sup over
/// t is attained at much smaller λ.
pub const KERNEL_LAMBDA_CAP: f64 = 4096.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalValue {
    pub value: f64,
    pub argmax_t: f64,
}

fn argmax(values: impl IntoIterator<Item = (f64, f64)>) -> Option<MaximalValue> {
    let mut best: Option<MaximalValue> = None;
    for (t, v) in values {
        if best.map_or(true, |b| v > b.value) {
            best = Some(MaximalValue { value: v, argmax_t: t });
        }
    }
    best
}

/// sup over the usable part of the grid of |K_{s,t}(z)|.
pub fn kernel_sup(s: f64, z: &[f64], n: usize, t_grid: &TimeGrid, opts: &KernelOptions) -> Result<MaximalValue> {
    let z2: f64 = z.iter().map(|v| v * v).sum();
    let times: Vec<f64> = t_grid
        .all_times()
        .into_iter()
        .filter(|&t| z2 / (2.0 * t) <= KERNEL_LAMBDA_CAP)
        .collect();
    if times.is_empty() {
        return Err(LabError::InvalidInput("no time in the grid satisfies the λ cap".into()));
    }
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| kernel_k_with(s, t, z, n, opts).map(|k| k.value.norm()))
        .collect::<Result<_>>()?;
    Ok(argmax(times.into_iter().zip(values)).expect("nonempty"))
}

fn point_on_axis(n: usize, r: f64) -> Vec<f64> {
    let mut z = vec![0.0; n];
    z[0] = r;
    z
}

/// sup_t |K_{s,t}(z)| over a dyadic |z| sweep; decay slopes on |z| ≤ 1 and
/// |z| > 1 against −max(s, n−s) and −s, stability of the fitted constants
/// under one refinement of the time grid, and for s > n the integrability of
/// K_s^* away from the origin.
pub fn kernel_sup_bound_experiment(s: f64, n: usize, z_sweep: &[f64], t_grid: &TimeGrid) -> Result<ExperimentReport> {
    if !(n == 1 || n == 2) {
        return Err(LabError::UnsupportedDimension(n));
    }
    let opts = KernelOptions::default();
    let mut report = ExperimentReport::new("kernel-bound");
    report.echo("n", n).echo("s", s).echo("times", t_grid.times.len());
    let fine = t_grid.refined();
    let mut coarse_pts = Vec::new();
    for &r in z_sweep {
        let z = point_on_axis(n, r);
        let m = kernel_sup(s, &z, n, t_grid, &opts)?;
        let mf = kernel_sup(s, &z, n, &fine, &opts)?;
        let quantity = if r <= 1.0 { "sup_inner" } else { "sup_outer" };
        report.push(Record::new(quantity, r, m.value).with_argmax(m.argmax_t));
        report.push(Record::new(&format!("{quantity}_refined"), r, mf.value).with_argmax(mf.argmax_t));
        coarse_pts.push((r, m.value));
    }
    let nf = n as f64;
    if s < nf {
        for (side, predicted, cmp) in [
            ("inner", -(s.max(nf - s)), Comparison::AtLeast),
            ("outer", -s, Comparison::AtMost),
        ] {
            let q = format!("sup_{side}");
            let fit = report.slope_claim(&format!("{side} decay slope"), &q, predicted, cmp, 0.1)?;
            let refined = report.slope_claim(
                &format!("{side} decay slope (refined t)"),
                &format!("{q}_refined"),
                predicted,
                cmp,
                0.1,
            )?;
            // Constants of the bound C|z|^{slope}, compared at the fitted slopes.
            let ratio = (fit.intercept - refined.intercept).abs().exp2();
            report.check(&format!("{side} constant stable under refinement"), ratio, 1.0, Comparison::AtMost, 3.0);
        }
    } else if s > nf {
        // ∫_{1≤|z|≤R} K_s^*: dyadic shell increments must decay.
        let outer: Vec<(f64, f64)> = coarse_pts.iter().copied().filter(|&(r, _)| r >= 1.0).collect();
        let measure = sphere_measure(n)?;
        for w in outer.windows(2) {
            let ((r0, v0), (r1, v1)) = (w[0], w[1]);
            // Trapezoid in log r of K* r^n.
            let inc = measure * 0.5 * (v0 * r0.powf(nf) + v1 * r1.powf(nf)) * (r1 / r0).ln();
            report.push(Record::new("shell_integral", r1, inc));
        }
        report.slope_claim("integrability: shell increments decay", "shell_integral", nf - s, Comparison::AtMost, 0.1)?;
        let decay = report.fit("integrability: shell increments decay").map(|f| f.slope).unwrap_or(f64::NAN);
        report.check("integrability: increments summable", decay, 0.0, Comparison::AtMost, 0.0);
    }
    Ok(report)
}

/// Which evolution route to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evaluator {
    Spectral,
    Radial,
}

pub fn evolve_with(evaluator: Evaluator, profile: &SpectralProfile, t: f64, x: &[f64]) -> Result<Complex64> {
    match evaluator {
        Evaluator::Spectral => evolve_spectral(profile, t, x),
        Evaluator::Radial => evolve_radial(profile, t, x.iter().map(|v| v * v).sum::<f64>().sqrt()),
    }
}

/// max over grid ∪ injected times of |e^{itΔ}f(x)|, with the maximizing t.
/// Ties go to the earliest time.
pub fn maximal_over_time(
    evaluator: Evaluator,
    profile: &SpectralProfile,
    x: &[f64],
    t_grid: &TimeGrid,
) -> Result<MaximalValue> {
    let times = t_grid.all_times();
    if times.is_empty() {
        return Err(LabError::InvalidInput("empty time grid".into()));
    }
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| evolve_with(evaluator, profile, t, x).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    Ok(argmax(times.into_iter().zip(values)).expect("nonempty"))
}

/// (2π)^{n/2}e^{−|ξ|²/2}, the transform of e^{−|x|²/2}.
pub fn gaussian_profile(n: usize) -> Result<SpectralProfile> {
    let c = (2.0 * PI).powf(0.5 * n as f64);
    SpectralProfile::explicit(
        n,
        move |xi: &[f64]| Complex64::new(c * (-0.5 * xi.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0),
        Support::Gaussian { width: 1.0 },
    )
}

/// (1+2it)^{−n/2} e^{−|x|²/(2(1+2it))}.
pub fn gaussian_evolution(n: usize, t: f64, x: &[f64]) -> Complex64 {
    let w = Complex64::new(1.0, 2.0 * t);
    let r2: f64 = x.iter().map(|v| v * v).sum();
    w.powf(-0.5 * n as f64) * (-r2 / (2.0 * w)).exp()
}

/// Gaussian closed form against [`evolve_spectral`] at `samples` seeded
/// (t, x) points for n = 1, 2, and discrete L² conservation of
/// [`evolve_grid`] at three times.
pub fn propagation_experiment(seed: u64, samples: usize) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("propagate");
    report.echo("seed", seed).echo("samples", samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=2 {
        let profile = gaussian_profile(n)?;
        let points: Vec<(f64, Vec<f64>)> = (0..samples)
            .map(|_| (rng.gen_range(0.0..1.0), (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()))
            .collect();
        let errors: Vec<f64> = points
            .par_iter()
            .map(|(t, x)| {
                let want = gaussian_evolution(n, *t, x);
                Ok((evolve_spectral(&profile, *t, x)? - want).norm() / want.norm())
            })
            .collect::<Result<_>>()?;
        let quantity = format!("gaussian_relative_error:n={n}");
        for ((t, _), e) in points.iter().zip(&errors) {
            report.push(Record::new(&quantity, *t, *e));
        }
        let worst = errors.iter().cloned().fold(0.0, f64::max);
        report.check(&format!("Gaussian closed form n = {n}"), worst, 0.0, Comparison::AtMost, 1e-6);

        let count = if n == 1 { 512 } else { 128 };
        let grid = GridSpec::cube(n, -20.0, 20.0, count)?;
        let f = SampledField::from_fn(grid, |x| Complex64::new((-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0))?;
        let mass = f.l2_norm_discrete();
        let mut drift = 0.0f64;
        for t in [0.1, 0.5, 0.9] {
            let d = (evolve_grid(&f, t)?.l2_norm_discrete() - mass).abs() / mass;
            report.push(Record::new(&format!("l2_drift:n={n}"), t, d));
            drift = drift.max(d);
        }
        report.check(&format!("discrete L2 conservation n = {n}"), drift, 0.0, Comparison::AtMost, 1e-10);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GridSpec;
    use crate::smooth::unit_bump;

    #[test]
    fn time_grid_invariants() {
        let g = TimeGrid::default_log();
        assert_eq!(g.times.len(), 64);
        assert!(g.times[0] > (-20f64).exp2() && *g.times.last().unwrap() < 1.0);
        assert!(g.times.windows(2).all(|w| w[0] < w[1]));
        assert!(TimeGrid::new(vec![0.5, 1.0]).is_err());
        let g = TimeGrid::new(vec![0.3, 0.1, 0.3]).unwrap();
        assert_eq!(g.times, vec![0.1, 0.3]);
        assert_eq!(g.refined().times.len(), 3);
        let inj = g.with_injected(vec![0.2]).unwrap();
        assert_eq!(inj.all_times(), vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn cutoffs_partition_unity() {
        let c = DyadicCutoffs::default();
        assert!(c.partition_error(12, 400) < 1e-10);
        for j in 1..6 {
            let (lo, hi) = c.support(Piece::Shell(j));
            assert_eq!(c.beta(Piece::Shell(j), 0.999 * lo), 0.0);
            assert_eq!(c.beta(Piece::Shell(j), 1.001 * hi), 0.0);
        }
    }

    #[test]
    fn gaussian_direct_route() {
        for n in 1..=2 {
            let prof = gaussian_profile(n).unwrap();
            for &(t, x) in &[(0.0, 0.3), (0.1, 1.2), (0.7, -0.8)] {
                let pt = vec![x; n];
                let got = evolve_spectral(&prof, t, &pt).unwrap();
                let want = gaussian_evolution(n, t, &pt);
                assert!((got - want).norm() < 1e-7 * want.norm(), "n={n} t={t}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn radial_origin_value() {
        let prof = SpectralProfile::radial(2, |r| Complex64::new(unit_bump(r - 2.0), 0.0), Support::Annulus {
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        let got = evolve_radial(&prof, 0.0, 0.0).unwrap();
        let want = crate::numerics::integrate_adaptive(|r| Complex64::new(unit_bump(r - 2.0) * r, 0.0), 1.0, 3.0, 1e-12)
            .unwrap()
            .value
            / (2.0 * PI);
        assert!((got - want).norm() < 1e-10);
    }

    #[test]
    fn radial_matches_iterated() {
        let prof = SpectralProfile::radial(2, |r| Complex64::new(unit_bump(r - 2.0), 0.0), Support::Annulus {
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        for &(t, x) in &[(0.05, [0.3, 0.4]), (0.6, [-1.0, 0.2])] {
            let a = evolve_spectral(&prof, t, &x).unwrap();
            let b = evolve_radial(&prof, t, (x[0] * x[0] + x[1] * x[1]).sqrt()).unwrap();
            assert!((a - b).norm() < 1e-6 * b.norm(), "{a} vs {b}");
        }
    }

    #[test]
    fn grid_route_gaussian_and_mass() {
        let grid = GridSpec::new(vec![(-20.0, 20.0)], vec![256]).unwrap();
        let f = SampledField::from_fn(grid, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0)).unwrap();
        let same = evolve_grid(&f, 0.0).unwrap();
        for (a, b) in same.values.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-12);
        }
        for t in [0.1, 0.5, 0.9] {
            let g = evolve_grid(&f, t).unwrap();
            assert!((g.l2_norm_discrete() - f.l2_norm_discrete()).abs() < 1e-10);
            for i in (0..256).step_by(17) {
                let x = g.grid.coordinate(0, i);
                assert!((g.values[i] - gaussian_evolution(1, t, &[x])).norm() < 1e-6);
            }
        }
        let coarse = GridSpec::new(vec![(-20.0, 20.0)], vec![64]).unwrap();
        let f = SampledField::from_fn(coarse, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0)).unwrap();
        assert!(matches!(evolve_grid(&f, 0.1), Err(LabError::BandLimitViolation { .. })));
    }

    #[test]
    fn kernel_near_zero_time() {
        // K_{2,t} → e^{−|z|}/2 as t → 0.
        let z = 0.05;
        let k = kernel_k(2.0, 1e-5, &[z], 1).unwrap();
        assert!((k - Complex64::new(0.5 * (-z).exp(), 0.0)).norm() < 1e-3, "{k}");
    }

    #[test]
    fn kernel_is_even_and_deterministic() {
        let a = kernel_k(0.75, 0.1, &[2.0], 1).unwrap();
        let b = kernel_k(0.75, 0.1, &[-2.0], 1).unwrap();
        assert_eq!(a, b);
        let c = kernel_k(1.2, 0.3, &[0.6, 0.8], 2).unwrap();
        let d = kernel_k(1.2, 0.3, &[1.0, 0.0], 2).unwrap();
        assert!((c - d).norm() < 1e-12 * d.norm().max(1.0));
    }

    #[test]
    fn maximal_argmax_and_singleton() {
        let prof = gaussian_profile(1).unwrap();
        let grid = TimeGrid::new(vec![0.01, 0.1, 0.5]).unwrap();
        let m = maximal_over_time(Evaluator::Spectral, &prof, &[0.0], &grid).unwrap();
        assert_eq!(m.argmax_t, 0.01);
        assert!(m.value <= 1.0 + 1e-9);
        let one = TimeGrid::new(vec![0.25]).unwrap();
        let m = maximal_over_time(Evaluator::Spectral, &prof, &[0.5], &one).unwrap();
        assert!((m.value - gaussian_evolution(1, 0.25, &[0.5]).norm()).abs() < 1e-9);
    }
}
