//! Leading stationary-phase terms in one and several variables, Van der
//! Corput bound shapes, and the quadrature oracles they are checked against.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::{
    fit_power_law, integrate_oscillatory_with, FnPhase, OscillatoryOptions, Phase1D, PolyPhase,
    PowerLawFit, QuadratureResult,
};
use crate::report::{Comparison, ExperimentReport, Record};
use crate::smooth::unit_bump;

pub type Amplitude1D = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type AmplitudeND = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// I(λ) = ∫_a^b e^{iλφ(x)} ψ(x) dx.
#[derive(Clone)]
pub struct OscillatoryProblem1D {
    pub phase: Arc<dyn Phase1D + Send + Sync>,
    pub amplitude: Amplitude1D,
    pub support: (f64, f64),
    pub lambda: f64,
}

impl std::fmt::Debug for OscillatoryProblem1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OscillatoryProblem1D")
            .field("support", &self.support)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

const PROBES: usize = 17;

impl OscillatoryProblem1D {
    /// Validates the support, λ, and the phase derivatives against central
    /// differences at a few interior probes.
    pub fn new(
        phase: Arc<dyn Phase1D + Send + Sync>,
        amplitude: Amplitude1D,
        support: (f64, f64),
        lambda: f64,
    ) -> Result<Self> {
        let (a, b) = support;
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(LabError::InvalidInput(format!("bad support [{a}, {b}]")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(LabError::InvalidInput(format!("lambda must be positive, got {lambda}")));
        }
        let h = 1e-5 * (b - a);
        for i in 1..PROBES {
            let x = a + (b - a) * i as f64 / PROBES as f64;
            let fd1 = (phase.value(x + h) - phase.value(x - h)) / (2.0 * h);
            let fd2 = (phase.derivative(x + h) - phase.derivative(x - h)) / (2.0 * h);
            let d1 = phase.derivative(x);
            let d2 = phase.second_derivative(x);
            if (fd1 - d1).abs() > 1e-6 * (1.0 + d1.abs()) || (fd2 - d2).abs() > 1e-6 * (1.0 + d2.abs())
            {
                return Err(LabError::InvalidInput(format!(
                    "phase derivatives disagree with finite differences at x = {x}"
                )));
            }
        }
        Ok(Self {
            phase,
            amplitude,
            support,
            lambda,
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    /// The problem with φ replaced by −φ.
    pub fn negated(&self) -> Self {
        let p = self.phase.clone();
        let (p1, p2) = (p.clone(), p.clone());
        let phase = FnPhase {
            f: move |x| -p.value(x),
            df: move |x| -p1.derivative(x),
            d2f: move |x| -p2.second_derivative(x),
        };
        Self {
            phase: Arc::new(phase),
            ..self.clone()
        }
    }

    /// Whether ψ vanishes at both ends of the support (to 1e−12 of its peak).
    pub fn amplitude_vanishes_at_ends(&self) -> bool {
        let (a, b) = self.support;
        let peak = self.sample_points(PROBES * 8)
            .iter()
            .map(|&x| (self.amplitude)(x).norm())
            .fold(0.0, f64::max);
        (self.amplitude)(a).norm() <= 1e-12 * peak && (self.amplitude)(b).norm() <= 1e-12 * peak
    }

    fn sample_points(&self, count: usize) -> Vec<f64> {
        let (a, b) = self.support;
        (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect()
    }

    /// Quadrature value of I(λ).
    pub fn oracle(&self, tol: f64) -> Result<QuadratureResult> {
        let amp = self.amplitude.clone();
        integrate_oscillatory_with(
            self.phase.as_ref(),
            move |x| amp(x),
            self.lambda,
            self.support,
            &OscillatoryOptions::absolute(tol),
        )
    }
}

const SAMPLE_COUNT: usize = 1 << 12;

/// Returns (|I(λ)|, λ^{−1/k}(∫|ψ'| + sup|ψ|)). ∫|ψ'| is the sampled total
/// variation of ψ.
pub fn van_der_corput_check(problem: &OscillatoryProblem1D, k: usize, tol: f64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(LabError::InvalidInput("k must be at least 1".into()));
    }
    let xs = problem.sample_points(SAMPLE_COUNT);
    let mut prev_d1: Option<f64> = None;
    let mut direction = 0.0f64;
    for &x in &xs {
        let dk = problem.phase.nth_derivative(k, x);
        if dk.abs() < 1.0 - 1e-9 {
            return Err(LabError::HypothesisViolation(format!(
                "|phi^({k})({x})| = {} < 1",
                dk.abs()
            )));
        }
        if k == 1 {
            let d1 = problem.phase.derivative(x);
            if let Some(p) = prev_d1 {
                let step = d1 - p;
                if step.abs() > 1e-12 * (1.0 + d1.abs()) {
                    if direction != 0.0 && step.signum() != direction {
                        return Err(LabError::HypothesisViolation(format!(
                            "phi' is not monotonic near x = {x}"
                        )));
                    }
                    direction = step.signum();
                }
            }
            prev_d1 = Some(d1);
        }
    }
    let values: Vec<Complex64> = xs.iter().map(|&x| (problem.amplitude)(x)).collect();
    let variation: f64 = values.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let observed = problem.oracle(tol)?.value.norm();
    let bound_shape = problem.lambda.powf(-1.0 / k as f64) * (variation + sup);
    Ok((observed, bound_shape))
}

/// Counts sign changes of φ' on the sampled support.
fn sign_changes_of_derivative(problem: &OscillatoryProblem1D) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for x in problem.sample_points(SAMPLE_COUNT) {
        let d = problem.phase.derivative(x);
        if d.abs() < 1e-14 {
            continue;
        }
        let s = d.signum();
        if last != 0.0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// λ^{−1/2} a₀ e^{iλφ(x₀)} with a₀ = e^{iπ/4}(2π/φ''(x₀))^{1/2}ψ(x₀) for
/// φ'' > 0 and e^{−iπ/4}(2π/|φ''(x₀)|)^{1/2}ψ(x₀) for φ'' < 0. The phase
/// factor is 1 under the usual normalization φ(x₀) = 0.
pub fn stationary_phase_1d_leading(problem: &OscillatoryProblem1D, x0: f64) -> Result<Complex64> {
    let (a, b) = problem.support;
    if !(a <= x0 && x0 <= b) {
        return Err(LabError::InvalidInput(format!("critical point {x0} outside [{a}, {b}]")));
    }
    let d1 = problem.phase.derivative(x0);
    let d2 = problem.phase.second_derivative(x0);
    if d2.abs() < 1e-10 {
        return Err(LabError::DegenerateCritical(format!("phi''({x0}) = {d2}")));
    }
    if d1.abs() > 1e-8 * (1.0 + d2.abs()) {
        return Err(LabError::InvalidInput(format!("phi'({x0}) = {d1} is not zero")));
    }
    if sign_changes_of_derivative(problem) > 1 {
        return Err(LabError::NotIsolated(format!(
            "phi' changes sign more than once on [{a}, {b}]"
        )));
    }
    let a0 = Complex64::from_polar((2.0 * PI / d2.abs()).sqrt(), FRAC_PI_4 * d2.signum())
        * (problem.amplitude)(x0);
    let lambda = problem.lambda;
    Ok(a0 * lambda.powf(-0.5) * Complex64::from_polar(1.0, lambda * problem.phase.value(x0)))
}

/// Phase on ℝⁿ with gradient and Hessian.
pub trait PhaseND: Sync + Send {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> DMatrix<f64>;
}

/// φ(u) = (u − c)ᵀ A (u − c).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPhase {
    pub matrix: DMatrix<f64>,
    pub center: Vec<f64>,
}

impl QuadraticPhase {
    pub fn new(matrix: DMatrix<f64>, center: Vec<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != center.len() || center.is_empty() {
            return Err(LabError::InvalidInput("matrix must be square and match the center".into()));
        }
        Ok(Self { matrix, center })
    }

    /// Diagonal form Σ d_j u_j².
    pub fn diagonal(entries: &[f64]) -> Self {
        Self {
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries)),
            center: vec![0.0; entries.len()],
        }
    }

    fn shifted(&self, x: &[f64]) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_iterator(x.len(), x.iter().zip(&self.center).map(|(a, c)| a - c))
    }
}

impl PhaseND for QuadraticPhase {
    fn dimension(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let u = self.shifted(x);
        u.dot(&(&self.matrix * &u))
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let u = self.shifted(x);
        let g = (&self.matrix + self.matrix.transpose()) * u;
        g.iter().copied().collect()
    }
    fn hessian(&self, _x: &[f64]) -> DMatrix<f64> {
        &self.matrix + self.matrix.transpose()
    }
}

/// ∫ e^{iλφ(u)} ψ(u) du over a box containing supp ψ, with a nondegenerate
/// critical point x₀.
#[derive(Clone)]
pub struct OscillatoryProblemND {
    pub phase: Arc<dyn PhaseND>,
    pub amplitude: AmplitudeND,
    pub critical_point: Vec<f64>,
    pub support: Vec<(f64, f64)>,
    pub lambda: f64,
}

impl std::fmt::Debug for OscillatoryProblemND {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OscillatoryProblemND")
            .field("critical_point", &self.critical_point)
            .field("support", &self.support)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

impl OscillatoryProblemND {
    pub fn new(
        phase: Arc<dyn PhaseND>,
        amplitude: AmplitudeND,
        critical_point: Vec<f64>,
        support: Vec<(f64, f64)>,
        lambda: f64,
    ) -> Result<Self> {
        let n = phase.dimension();
        if critical_point.len() != n || support.len() != n {
            return Err(LabError::InvalidInput("dimension mismatch".into()));
        }
        if !(lambda > 0.0) {
            return Err(LabError::InvalidInput(format!("lambda must be positive, got {lambda}")));
        }
        let g = phase.gradient(&critical_point);
        if g.iter().any(|v| v.abs() > 1e-10) {
            return Err(LabError::InvalidInput(format!("gradient at x0 is {g:?}, not zero")));
        }
        let problem = Self {
            phase,
            amplitude,
            critical_point,
            support,
            lambda,
        };
        problem.hessian_eigenvalues()?;
        Ok(problem)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    /// Eigenvalues of ∇²φ(x₀), ascending.
    pub fn hessian_eigenvalues(&self) -> Result<Vec<f64>> {
        let h = self.phase.hessian(&self.critical_point);
        let asym = (&h - h.transpose()).abs().max();
        if asym > 1e-8 {
            return Err(LabError::NonSymmetricHessian(asym));
        }
        let sym = (&h + h.transpose()) * 0.5;
        let mut mu: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        mu.sort_by(f64::total_cmp);
        if let Some(m) = mu.iter().find(|m| m.abs() < 1e-8) {
            return Err(LabError::DegenerateCritical(format!("Hessian eigenvalue {m}")));
        }
        Ok(mu)
    }

    /// Iterated quadrature oracle, n = 1 or 2. The outer integrand has the
    /// oscillation e^{iλφ(u₁, x₀₂)} factored out so its panels are sized from
    /// the phase restricted to the line through x₀.
    pub fn oracle(&self, tol: f64) -> Result<QuadratureResult> {
        let n = self.critical_point.len();
        let lambda = self.lambda;
        match n {
            1 => {
                let p = self.phase.clone();
                let (p1, p2) = (p.clone(), p.clone());
                let phase = FnPhase {
                    f: move |x| p.value(&[x]),
                    df: move |x| p1.gradient(&[x])[0],
                    d2f: move |x| p2.hessian(&[x])[(0, 0)],
                };
                let amp = self.amplitude.clone();
                integrate_oscillatory_with(
                    &phase,
                    move |x| amp(&[x]),
                    lambda,
                    self.support[0],
                    &OscillatoryOptions::absolute(tol),
                )
            }
            2 => {
                let x02 = self.critical_point[1];
                let (lo1, hi1) = self.support[0];
                let inner_tol = 0.1 * tol / (hi1 - lo1);
                let failure: RefCell<Option<LabError>> = RefCell::new(None);
                let evaluations = RefCell::new(0usize);
                let inner = |u1: f64| -> Complex64 {
                    let (p, p1, p2) = (self.phase.clone(), self.phase.clone(), self.phase.clone());
                    let phase = FnPhase {
                        f: move |u2| p.value(&[u1, u2]),
                        df: move |u2| p1.gradient(&[u1, u2])[1],
                        d2f: move |u2| p2.hessian(&[u1, u2])[(1, 1)],
                    };
                    let amp = self.amplitude.clone();
                    let r = integrate_oscillatory_with(
                        &phase,
                        move |u2| amp(&[u1, u2]),
                        lambda,
                        self.support[1],
                        &OscillatoryOptions::absolute(inner_tol),
                    );
                    match r {
                        Ok(q) => {
                            *evaluations.borrow_mut() += q.evaluations;
                            q.value * Complex64::from_polar(1.0, -lambda * self.phase.value(&[u1, x02]))
                        }
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                };
                let (p, p1, p2) = (self.phase.clone(), self.phase.clone(), self.phase.clone());
                let outer_phase = FnPhase {
                    f: move |u1| p.value(&[u1, x02]),
                    df: move |u1| p1.gradient(&[u1, x02])[0],
                    d2f: move |u1| p2.hessian(&[u1, x02])[(0, 0)],
                };
                let mut q = integrate_oscillatory_with(
                    &outer_phase,
                    inner,
                    lambda,
                    self.support[0],
                    &OscillatoryOptions::absolute(0.5 * tol),
                )?;
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                q.evaluations += evaluations.into_inner();
                Ok(q)
            }
            _ => Err(LabError::UnsupportedDimension(n)),
        }
    }
}

/// λ^{−n/2} a₀ with a₀ = ψ(x₀)(2π)^{n/2} ∏_j 1/(e^{−iπ/4} μ_j^{1/2}), where
/// μ_j^{1/2} = |μ_j|^{1/2} e^{iπ/2} for μ_j < 0. Equivalently each factor is
/// e^{iπ sgn(μ_j)/4}|μ_j|^{−1/2}, the product of one-dimensional Fresnel
/// factors; this is the branch the quadrature oracle confirms.
pub fn stationary_phase_nd_leading(problem: &OscillatoryProblemND) -> Result<Complex64> {
    let mu = problem.hessian_eigenvalues()?;
    let n = mu.len() as f64;
    let mut a0 = (problem.amplitude)(&problem.critical_point) * (2.0 * PI).powf(0.5 * n);
    for &m in &mu {
        let root = if m > 0.0 {
            Complex64::new(m.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-m).sqrt())
        };
        a0 /= Complex64::from_polar(1.0, -FRAC_PI_4) * root;
    }
    let lambda = problem.lambda;
    Ok(a0
        * lambda.powf(-0.5 * n)
        * Complex64::from_polar(1.0, lambda * problem.phase.value(&problem.critical_point)))
}

/// Error-decay verdict for a leading-order prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCheck {
    pub fit: PowerLawFit,
    pub expected_error_slope: f64,
    pub passed: bool,
}

/// Fits |oracle − prediction| against λ; passes when the slope is at most
/// `expected_error_slope + 0.1`.
pub fn verify_asymptotic<P>(
    oracle_values: &[(f64, Complex64)],
    prediction: P,
    expected_error_slope: f64,
) -> Result<AsymptoticCheck>
where
    P: Fn(f64) -> Complex64,
{
    if oracle_values.len() < 4 {
        return Err(LabError::DegenerateSweep(format!(
            "need at least 4 sweep points, got {}",
            oracle_values.len()
        )));
    }
    let points: Vec<(f64, f64)> = oracle_values
        .iter()
        .map(|&(lambda, v)| (lambda, (v - prediction(lambda)).norm()))
        .collect();
    let fit = fit_power_law(&points)?;
    Ok(AsymptoticCheck {
        fit,
        expected_error_slope,
        passed: fit.slope <= expected_error_slope + 0.1,
    })
}

/// A fixed problem in the regression corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub problem: OscillatoryProblem1D,
    /// Nondegenerate critical point, for stationary-phase entries.
    pub critical_point: Option<f64>,
    /// φ and ψ both even about the critical point.
    pub even_symmetric: bool,
    /// Derivative order k for Van der Corput entries.
    pub vdc_order: Option<usize>,
}

fn real_amp<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Amplitude1D {
    Arc::new(move |x| Complex64::new(f(x), 0.0))
}

fn entry(
    name: &'static str,
    phase: Arc<dyn Phase1D + Send + Sync>,
    amplitude: Amplitude1D,
    support: (f64, f64),
) -> OscillatoryProblem1D {
    OscillatoryProblem1D::new(phase, amplitude, support, 1.0)
        .unwrap_or_else(|e| panic!("corpus entry {name} is malformed: {e}"))
}

/// Stationary-phase corpus:
///
/// | name | φ | ψ | support |
/// |---|---|---|---|
/// | `fresnel-minus` | −x² | e^{−x²} | [−10, 10] |
/// | `fresnel-plus` | x² | e^{−x²} | [−10, 10] |
/// | `bump-half-square` | x²/2 | bump(x) | [−1, 1] |
/// | `cubic-skewed-bump` | x²/2 + x³/6 | bump((x − 1/4)/(5/4)) | [−1, 3/2] |
/// | `cosine-skewed-bump` | 1 − cos x | (1 + x/2)·bump((x − 1/4)/(7/4)) | [−3/2, 2] |
///
/// bump(u) = exp(1 − 1/(1 − u²)).
pub fn stationary_corpus() -> Vec<CorpusEntry> {
    let cosine = FnPhase {
        f: |x: f64| 1.0 - x.cos(),
        df: |x: f64| x.sin(),
        d2f: |x: f64| x.cos(),
    };
    vec![
        CorpusEntry {
            name: "fresnel-minus",
            problem: entry(
                "fresnel-minus",
                Arc::new(PolyPhase::new(vec![0.0, 0.0, -1.0])),
                real_amp(|x| (-x * x).exp()),
                (-10.0, 10.0),
            ),
            critical_point: Some(0.0),
            even_symmetric: true,
            vdc_order: None,
        },
        CorpusEntry {
            name: "fresnel-plus",
            problem: entry(
                "fresnel-plus",
                Arc::new(PolyPhase::new(vec![0.0, 0.0, 1.0])),
                real_amp(|x| (-x * x).exp()),
                (-10.0, 10.0),
            ),
            critical_point: Some(0.0),
            even_symmetric: true,
            vdc_order: None,
        },
        CorpusEntry {
            name: "bump-half-square",
            problem: entry(
                "bump-half-square",
                Arc::new(PolyPhase::new(vec![0.0, 0.0, 0.5])),
                real_amp(unit_bump),
                (-1.0, 1.0),
            ),
            critical_point: Some(0.0),
            even_symmetric: true,
            vdc_order: None,
        },
        CorpusEntry {
            name: "cubic-skewed-bump",
            problem: entry(
                "cubic-skewed-bump",
                Arc::new(PolyPhase::new(vec![0.0, 0.0, 0.5, 1.0 / 6.0])),
                real_amp(|x| unit_bump((x - 0.25) / 1.25)),
                (-1.0, 1.5),
            ),
            critical_point: Some(0.0),
            even_symmetric: false,
            vdc_order: None,
        },
        CorpusEntry {
            name: "cosine-skewed-bump",
            problem: entry(
                "cosine-skewed-bump",
                Arc::new(cosine),
                real_amp(|x| (1.0 + 0.5 * x) * unit_bump((x - 0.25) / 1.75)),
                (-1.5, 2.0),
            ),
            critical_point: Some(0.0),
            even_symmetric: false,
            vdc_order: None,
        },
    ]
}

/// Van der Corput corpus (|φ^{(k)}| ≥ 1 on the support):
///
/// | name | k | φ | ψ | support |
/// |---|---|---|---|---|
/// | `linear-unit` | 1 | x | 1 | [0, 1] |
/// | `linear-fading` | 1 | x | (1 − x)⁴ | [0, 1] |
/// | `convex-fading` | 1 | x + x²/2 | (1 − x)⁴ | [0, 1] |
/// | `half-square-bump` | 2 | x²/2 | bump(x) | [−1, 1] |
/// | `cosh-bump` | 2 | cosh x − 1 | bump(x) | [−1, 1] |
/// | `cubic-bump` | 3 | x³/6 | bump(x) | [−1, 1] |
/// | `sinh-bump` | 3 | sinh x − x | bump(x) | [−1, 1] |
///
/// `linear-unit` has |I(λ)| = 2|sin(λ/2)|/λ, so its ratio to the bound shape
/// oscillates with λ; it is kept for the closed-form check and excluded from
/// ratio-stability sweeps (`stable_ratio` false).
pub fn van_der_corput_corpus() -> Vec<(CorpusEntry, bool)> {
    let vdc = |name: &'static str,
               k: usize,
               phase: Arc<dyn Phase1D + Send + Sync>,
               amp: Amplitude1D,
               support: (f64, f64)| CorpusEntry {
        name,
        problem: entry(name, phase, amp, support),
        critical_point: None,
        even_symmetric: false,
        vdc_order: Some(k),
    };
    let cosh = FnPhase {
        f: |x: f64| x.cosh() - 1.0,
        df: |x: f64| x.sinh(),
        d2f: |x: f64| x.cosh(),
    };
    struct SinhPhase;
    impl Phase1D for SinhPhase {
        fn value(&self, x: f64) -> f64 {
            x.sinh() - x
        }
        fn derivative(&self, x: f64) -> f64 {
            x.cosh() - 1.0
        }
        fn second_derivative(&self, x: f64) -> f64 {
            x.sinh()
        }
        fn nth_derivative(&self, k: usize, x: f64) -> f64 {
            match k {
                0 => self.value(x),
                1 => self.derivative(x),
                _ if k % 2 == 0 => x.sinh(),
                _ => x.cosh(),
            }
        }
    }
    vec![
        (
            vdc("linear-unit", 1, Arc::new(PolyPhase::new(vec![0.0, 1.0])), real_amp(|_| 1.0), (0.0, 1.0)),
            false,
        ),
        (
            vdc(
                "linear-fading",
                1,
                Arc::new(PolyPhase::new(vec![0.0, 1.0])),
                real_amp(|x| (1.0 - x).powi(4)),
                (0.0, 1.0),
            ),
            true,
        ),
        (
            vdc(
                "convex-fading",
                1,
                Arc::new(PolyPhase::new(vec![0.0, 1.0, 0.5])),
                real_amp(|x| (1.0 - x).powi(4)),
                (0.0, 1.0),
            ),
            true,
        ),
        (
            vdc(
                "half-square-bump",
                2,
                Arc::new(PolyPhase::new(vec![0.0, 0.0, 0.5])),
                real_amp(unit_bump),
                (-1.0, 1.0),
            ),
            true,
        ),
        (vdc("cosh-bump", 2, Arc::new(cosh), real_amp(unit_bump), (-1.0, 1.0)), true),
        (
            vdc(
                "cubic-bump",
                3,
                Arc::new(PolyPhase::new(vec![0.0, 0.0, 0.0, 1.0 / 6.0])),
                real_amp(unit_bump),
                (-1.0, 1.0),
            ),
            true,
        ),
        (vdc("sinh-bump", 3, Arc::new(SinhPhase), real_amp(unit_bump), (-1.0, 1.0)), true),
    ]
}

/// Leading-term error against λ for every stationary-corpus entry (slope at
/// most −0.9, or −1.4 for even-symmetric entries), plus the n = 2 Fresnel
/// problem e^{−iλ|u|²}·bump(|u|) at `fresnel_lambda` (relative error below 2%).
pub fn stationary_phase_experiment(lambdas: &[f64], fresnel_lambda: f64) -> Result<ExperimentReport> {
    if lambdas.len() < 4 {
        return Err(LabError::DegenerateSweep(format!("need at least 4 sweep points, got {}", lambdas.len())));
    }
    let mut report = ExperimentReport::new("stationary-phase");
    report.echo("lambdas", lambdas.len());
    for entry in stationary_corpus() {
        let x0 = entry.critical_point.expect("stationary entries carry x0");
        let errors: Vec<(f64, f64)> = lambdas
            .par_iter()
            .map(|&lambda| {
                let p = entry.problem.with_lambda(lambda);
                let lead = stationary_phase_1d_leading(&p, x0)?;
                Ok((lambda, (p.oracle(1e-13)?.value - lead).norm()))
            })
            .collect::<Result<_>>()?;
        let quantity = format!("error:{}", entry.name);
        for (lambda, e) in errors {
            report.push(Record::new(&quantity, lambda, e));
        }
        let (slope, label) = if entry.even_symmetric { (-1.5, "even") } else { (-1.0, "generic") };
        report.slope_claim(&format!("error slope {} ({label})", entry.name), &quantity, slope, Comparison::AtMost, 0.1)?;
    }
    let lambda = fresnel_lambda;
    let fresnel = OscillatoryProblemND::new(
        Arc::new(QuadraticPhase::diagonal(&[-1.0, -1.0])),
        Arc::new(|u: &[f64]| Complex64::new(unit_bump(u.iter().map(|v| v * v).sum::<f64>().sqrt()), 0.0)),
        vec![0.0, 0.0],
        vec![(-1.0, 1.0); 2],
        lambda,
    )?;
    let lead = stationary_phase_nd_leading(&fresnel)?;
    let oracle = fresnel.oracle(1e-12)?.value;
    let rel = (oracle - lead).norm() / oracle.norm();
    report.push(Record::new("fresnel2d_relative_error", lambda, rel));
    report.check("n = 2 Fresnel relative error", rel, 0.0, Comparison::AtMost, 0.02);
    Ok(report)
}

/// |I(λ)| over the Van der Corput bound shape for every ratio-stable corpus
/// entry; the ratio may vary by at most a factor 3 across `lambdas`.
pub fn van_der_corput_experiment(lambdas: &[f64]) -> Result<ExperimentReport> {
    if lambdas.len() < 2 {
        return Err(LabError::DegenerateSweep(format!("need at least 2 sweep points, got {}", lambdas.len())));
    }
    let mut report = ExperimentReport::new("van-der-corput");
    for (entry, stable) in van_der_corput_corpus() {
        if !stable {
            continue;
        }
        let k = entry.vdc_order.expect("corpus entries carry k");
        let ratios: Vec<(f64, f64)> = lambdas
            .par_iter()
            .map(|&lambda| {
                let (observed, shape) = van_der_corput_check(&entry.problem.with_lambda(lambda), k, 1e-13)?;
                Ok((lambda, observed / shape))
            })
            .collect::<Result<_>>()?;
        let quantity = format!("ratio:{}", entry.name);
        for &(lambda, r) in &ratios {
            report.push(Record::new(&quantity, lambda, r));
        }
        let hi = ratios.iter().map(|r| r.1).fold(f64::MIN, f64::max);
        let lo = ratios.iter().map(|r| r.1).fold(f64::MAX, f64::min);
        report.check(&format!("ratio variation {} (k = {k})", entry.name), hi / lo, 1.0, Comparison::AtMost, 2.0);
    }
    Ok(report)
}
