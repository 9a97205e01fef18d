//! Globally adaptive Gauss–Kronrod quadrature for complex integrands, plus an
//! oscillation-aware front end that sizes the initial panels from the local
//! frequency λ|φ'| of the phase.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on the number of live panels.
    pub max_panels: usize,
}

impl QuadratureOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            max_panels: 1_000_000,
        }
    }

    pub fn relative(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_panels: 1_000_000,
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

pub(crate) const NODES_PER_PANEL: usize = 21;

/// One Gauss–Kronrod 21 panel: (Kronrod value, error estimate).
pub(crate) fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        // Gauss nodes are the odd-indexed Kronrod abscissae.
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let hl = half.abs();
    let value = kronrod * half;
    resabs *= hl;
    resasc *= hl;
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

#[derive(Debug, PartialEq)]
struct Ranked {
    err: f64,
    index: usize,
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Adaptive quadrature of a complex integrand over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_panels(&f, &[a, b], &QuadratureOptions::absolute(tol))
}

/// Global adaptive bisection starting from the panels delimited by
/// `breakpoints` (strictly increasing). The worst panel is always split next.
pub fn integrate_panels<F>(
    f: &F,
    breakpoints: &[f64],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if breakpoints.len() < 2 {
        return Err(LabError::InvalidInput(
            "need at least two breakpoints".into(),
        ));
    }
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return Err(LabError::InvalidInput("tolerance must be positive".into()));
    }
    for w in breakpoints.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(LabError::InvalidInput(format!(
                "breakpoints must be finite and increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(breakpoints.len() * 2);
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evaluations = 0usize;
    for w in breakpoints.windows(2) {
        let (value, err) = gk21(f, w[0], w[1]);
        evaluations += NODES_PER_PANEL;
        total += value;
        total_err += err;
        heap.push(Ranked {
            err,
            index: panels.len(),
        });
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
        });
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(LabError::DomainError("integrand is not finite".into()));
    }

    let target = |v: Complex64| opts.abs_tol.max(opts.rel_tol * v.norm());
    let mut since_resum = 0usize;
    while total_err > target(total) {
        if panels.len() >= opts.max_panels {
            break;
        }
        let Some(top) = heap.pop() else { break };
        let p = panels[top.index];
        let mid = 0.5 * (p.a + p.b);
        if !(p.a < mid && mid < p.b) {
            // Panel is at floating-point resolution; it cannot be refined.
            continue;
        }
        let (v1, e1) = gk21(f, p.a, mid);
        let (v2, e2) = gk21(f, mid, p.b);
        evaluations += 2 * NODES_PER_PANEL;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        panels[top.index] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            err: e1,
        };
        heap.push(Ranked {
            err: e1,
            index: top.index,
        });
        heap.push(Ranked {
            err: e2,
            index: panels.len(),
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            err: e2,
        });
        since_resum += 1;
        if since_resum >= 4096 {
            // Incremental updates drift; resum exactly now and then.
            total = panels.iter().map(|p| p.value).sum();
            total_err = panels.iter().map(|p| p.err).sum();
            since_resum = 0;
        }
    }

    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: Complex64 = panels.iter().map(|p| p.value).sum();
    let error_estimate: f64 = panels.iter().map(|p| p.err).sum();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(LabError::DomainError("integrand is not finite".into()));
    }
    if error_estimate > target(value) {
        return Err(LabError::NonConvergence {
            value_re: value.re,
            value_im: value.im,
            error_estimate,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
    })
}

/// Real phase function with derivative access.
pub trait Phase1D: Sync {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;

    /// k-th derivative; orders above two fall back to central differences of
    /// the second derivative.
    fn nth_derivative(&self, k: usize, x: f64) -> f64 {
        match k {
            0 => self.value(x),
            1 => self.derivative(x),
            2 => self.second_derivative(x),
            _ => {
                let h = 1e-3 * (1.0 + x.abs());
                let up = self.nth_derivative(k - 1, x + h);
                let down = self.nth_derivative(k - 1, x - h);
                (up - down) / (2.0 * h)
            }
        }
    }
}

/// Polynomial phase `Σ c_j x^j` with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPhase {
    pub coeffs: Vec<f64>,
}

impl PolyPhase {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    fn eval_derivative(&self, k: usize, x: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate().skip(k).rev() {
            let falling: f64 = ((j - k + 1)..=j).map(|m| m as f64).product();
            acc = acc * x + c * falling;
        }
        acc
    }
}

impl Phase1D for PolyPhase {
    fn value(&self, x: f64) -> f64 {
        self.eval_derivative(0, x)
    }
    fn derivative(&self, x: f64) -> f64 {
        self.eval_derivative(1, x)
    }
    fn second_derivative(&self, x: f64) -> f64 {
        self.eval_derivative(2, x)
    }
    fn nth_derivative(&self, k: usize, x: f64) -> f64 {
        self.eval_derivative(k, x)
    }
}

/// Phase assembled from closures for the value and first two derivatives.
pub struct FnPhase<F, D, D2> {
    pub f: F,
    pub df: D,
    pub d2f: D2,
}

impl<F, D, D2> Phase1D for FnPhase<F, D, D2>
where
    F: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
    D2: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (self.df)(x)
    }
    fn second_derivative(&self, x: f64) -> f64 {
        (self.d2f)(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatoryOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Extra angular frequency carried by the amplitude itself (e.g. a Bessel
    /// factor), added to λ|φ'| when sizing panels.
    pub amplitude_rate: f64,
    /// Points where the amplitude is not smooth; panels never straddle them.
    pub breakpoints: Vec<f64>,
    pub max_panels: usize,
    /// Each initial panel is split into 2^refine equal parts.
    pub refine: u32,
}

impl OscillatoryOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            amplitude_rate: 0.0,
            breakpoints: Vec::new(),
            max_panels: 1_000_000,
            refine: 0,
        }
    }

    pub fn relative(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::absolute(abs_tol)
        }
    }

    pub fn with_amplitude_rate(mut self, rate: f64) -> Self {
        self.amplitude_rate = rate;
        self
    }

    pub fn with_breakpoints(mut self, points: Vec<f64>) -> Self {
        self.breakpoints = points;
        self
    }

    pub fn with_refine(mut self, refine: u32) -> Self {
        self.refine = refine;
        self
    }
}

/// Initial panel width cap: one local period, i.e. 21 nodes per period.
const PHASE_PER_PANEL: f64 = 2.0 * std::f64::consts::PI;

/// Split `[a, b]` so that every panel spans at most one local period of the
/// combined frequency `λ|φ'| + amplitude_rate`.
pub(crate) fn oscillation_panels(
    phase: &dyn Phase1D,
    lambda: f64,
    a: f64,
    b: f64,
    amplitude_rate: f64,
    max_panels: usize,
) -> Result<Vec<f64>> {
    let freq = |x: f64| lambda * phase.derivative(x).abs() + amplitude_rate.abs();
    let mut points = vec![a];
    let mut x = a;
    while x < b {
        let mut h = b - x;
        for _ in 0..4 {
            let w = freq(x).max(freq(x + 0.5 * h)).max(freq(x + h));
            if w * h <= PHASE_PER_PANEL {
                break;
            }
            h = PHASE_PER_PANEL / w;
        }
        let next = if b - (x + h) < 1e-3 * h { b } else { x + h };
        if !(next > x) {
            break;
        }
        points.push(next);
        x = next;
        if points.len() > max_panels {
            return Err(LabError::GridTooLarge {
                requested: points.len(),
                cap: max_panels,
            });
        }
    }
    if *points.last().unwrap() != b {
        points.push(b);
    }
    Ok(points)
}

/// ∫_a^b e^{iλφ(x)} ψ(x) dx with panels resolving the oscillation.
pub fn integrate_oscillatory_1d<A>(
    phase: &dyn Phase1D,
    amplitude: A,
    lambda: f64,
    interval: (f64, f64),
    tol: f64,
) -> Result<QuadratureResult>
where
    A: Fn(f64) -> Complex64,
{
    integrate_oscillatory_with(
        phase,
        amplitude,
        lambda,
        interval,
        &OscillatoryOptions::absolute(tol),
    )
}

pub fn integrate_oscillatory_with<A>(
    phase: &dyn Phase1D,
    amplitude: A,
    lambda: f64,
    interval: (f64, f64),
    opts: &OscillatoryOptions,
) -> Result<QuadratureResult>
where
    A: Fn(f64) -> Complex64,
{
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(LabError::InvalidInput(format!("bad interval [{a}, {b}]")));
    }
    if !(lambda > 0.0) {
        return Err(LabError::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    let mut cuts: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    let mut breakpoints = vec![a];
    for w in cuts.windows(2) {
        let pts = oscillation_panels(
            phase,
            lambda,
            w[0],
            w[1],
            opts.amplitude_rate,
            opts.max_panels,
        )?;
        let parts = 1usize << opts.refine;
        for p in pts.windows(2) {
            for m in 1..parts {
                breakpoints.push(p[0] + (p[1] - p[0]) * m as f64 / parts as f64);
            }
            breakpoints.push(p[1]);
        }
    }
    let integrand = |x: f64| Complex64::from_polar(1.0, lambda * phase.value(x)) * amplitude(x);
    let qopts = QuadratureOptions {
        abs_tol: opts.abs_tol,
        rel_tol: opts.rel_tol,
        max_panels: opts.max_panels.max(4 * breakpoints.len()),
    };
    integrate_panels(&integrand, &breakpoints, &qopts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn panel_rule_is_exact_for_high_degree_polynomials() {
        for deg in [0, 5, 19, 30] {
            let (v, _) = gk21(&|x: f64| c(x.powi(deg)), 0.0, 1.0);
            assert!((v.re - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn square_on_unit_interval() {
        let r = integrate_adaptive(|x| c(x * x), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.error_estimate <= 1e-10);
        assert!(r.evaluations >= 1);
    }

    #[test]
    fn pure_exponential() {
        let r = integrate_adaptive(|x| Complex64::from_polar(1.0, 100.0 * x), 0.0, 1.0, 1e-10)
            .unwrap();
        let exact = (Complex64::from_polar(1.0, 100.0) - 1.0) / Complex64::new(0.0, 100.0);
        assert!((r.value - exact).norm() < 1e-10);
    }

    #[test]
    fn gaussian_mass() {
        let r = integrate_adaptive(|x| c((-x * x).exp()), -8.0, 8.0, 1e-10).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_reports_best_value() {
        let opts = QuadratureOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_panels: 4,
        };
        let err = integrate_panels(&|x: f64| c((1.0 / x).sin()), &[1e-6, 1.0], &opts).unwrap_err();
        assert!(matches!(err, LabError::NonConvergence { .. }));
    }

    #[test]
    fn linear_phase_closed_form() {
        let phase = PolyPhase::new(vec![0.0, 1.0]);
        let r = integrate_oscillatory_1d(&phase, |_| c(1.0), 100.0, (0.0, 1.0), 1e-12).unwrap();
        let exact = (Complex64::from_polar(1.0, 100.0) - 1.0) / Complex64::new(0.0, 100.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn complex_gaussian_closed_form() {
        let phase = PolyPhase::new(vec![0.0, 0.0, -1.0]);
        let r = integrate_oscillatory_1d(&phase, |x| c((-x * x).exp()), 64.0, (-10.0, 10.0), 1e-12)
            .unwrap();
        let exact = (Complex64::new(PI, 0.0) / Complex64::new(1.0, 64.0)).sqrt();
        assert!((r.value - exact).norm() < 1e-10, "{} vs {}", r.value, exact);
    }

    #[test]
    fn poly_phase_derivatives() {
        let p = PolyPhase::new(vec![1.0, 2.0, 3.0, 4.0]);
        let x = 0.7;
        assert!((p.value(x) - (1.0 + 2.0 * x + 3.0 * x * x + 4.0 * x * x * x)).abs() < 1e-14);
        assert!((p.derivative(x) - (2.0 + 6.0 * x + 12.0 * x * x)).abs() < 1e-14);
        assert!((p.second_derivative(x) - (6.0 + 24.0 * x)).abs() < 1e-14);
        assert!((p.nth_derivative(3, x) - 24.0).abs() < 1e-14);
        assert_eq!(p.nth_derivative(4, x), 0.0);
    }

    #[test]
    fn oscillatory_and_plain_rules_agree() {
        let phase = PolyPhase::new(vec![0.0, 0.3, 0.5]);
        let amp = |x: f64| c((-(x - 0.2) * (x - 0.2)).exp());
        let lambda = 40.0;
        let osc = integrate_oscillatory_1d(&phase, amp, lambda, (-3.0, 4.0), 1e-11).unwrap();
        let plain = integrate_adaptive(
            |x| Complex64::from_polar(1.0, lambda * phase.value(x)) * amp(x),
            -3.0,
            4.0,
            1e-11,
        )
        .unwrap();
        assert!((osc.value - plain.value).norm() <= osc.error_estimate + plain.error_estimate + 1e-13);
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let phase = PolyPhase::new(vec![0.0, 0.0, 0.5, 0.1]);
        let run = || {
            integrate_oscillatory_1d(&phase, |x| c((-x * x).exp()), 300.0, (-5.0, 5.0), 1e-10)
                .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }
}
