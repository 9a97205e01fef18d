//! Γ, the Bessel function J_ν from its Poisson integral, the remainder after
//! its leading oscillation, and the Fourier transform of sphere measure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::quadrature::gk21;
use crate::numerics::{integrate_oscillatory_with, FnPhase, OscillatoryOptions};
use crate::report::{Comparison, ExperimentReport, Record};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0 (Lanczos, g = 7, nine terms).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LabError::DomainError(format!("gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        // The series is least accurate near zero; shift up once.
        return Ok(gamma_fn(x + 1.0)? / x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc)
}

/// Order ν of a Bessel function; the integral definition needs ν > −1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > -0.5) || !nu.is_finite() {
            return Err(LabError::DomainError(format!("Bessel order must exceed -1/2, got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(self) -> f64 {
        self.nu
    }

    fn has_integer_weight(self) -> bool {
        (2.0 * self.nu).fract() == 0.0
    }
}

/// 2 (r/2)^ν / (Γ(ν+1/2) √π), the factor in front of ∫_0^{π/2}.
fn poisson_prefactor(nu: f64, r: f64) -> Result<f64> {
    Ok(2.0 * (0.5 * r).powf(nu) / (gamma_fn(nu + 0.5)? * PI.sqrt()))
}

/// J_ν(r) from (r/2)^ν/(Γ(ν+½)Γ(½)) ∫_{-1}^{1} e^{irs}(1−s²)^{ν−½} ds with
/// s = sin θ, which folds to 2∫_0^{π/2} cos(r sin θ) cos^{2ν}θ dθ.
pub fn bessel_j(order: BesselOrder, r: f64) -> Result<f64> {
    bessel_j_refined(order, r, 0)
}

/// As [`bessel_j`], with every initial quadrature panel split into
/// 2^`refine` parts. Used to check the quadrature against itself.
pub fn bessel_j_refined(order: BesselOrder, r: f64, refine: u32) -> Result<f64> {
    let nu = order.nu;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(LabError::DomainError(format!("Bessel argument must be >= 0, got {r}")));
    }
    if r == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(LabError::DomainError("J_nu(0) is infinite for nu < 0".into()))
        };
    }
    let pre = poisson_prefactor(nu, r)?;
    let phase = FnPhase {
        f: |t: f64| t.sin(),
        df: |t: f64| t.cos(),
        d2f: |t: f64| -t.sin(),
    };
    let weight = |t: f64| Complex64::new(t.cos().max(0.0).powf(2.0 * nu), 0.0);
    let tol = (1e-11 / pre).max(1e-13);
    let opts = OscillatoryOptions::absolute(tol).with_refine(refine);
    let q = integrate_oscillatory_with(&phase, weight, r, (0.0, FRAC_PI_2), &opts)?;
    Ok(pre * q.value.re)
}

/// Large-argument Hankel expansion of J_ν, valid for r ≥ 25 where the
/// smallest term is far below double precision for the orders used here.
pub fn bessel_j_asymptotic(order: BesselOrder, r: f64) -> Result<f64> {
    if !(r >= 25.0) {
        return Err(LabError::DomainError(format!(
            "asymptotic expansion needs r >= 25, got {r}"
        )));
    }
    let mu = 4.0 * order.nu * order.nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * r);
        }
        let size = term.abs();
        if size > prev {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if size < 1e-17 * p.abs().max(1e-300) {
            break;
        }
        prev = size;
    }
    let chi = r - 0.5 * PI * order.nu - FRAC_PI_4;
    Ok((2.0 / (PI * r)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// Poisson integral on eight fixed Kronrod panels; accurate to roundoff for
/// r < 25 when 2ν is an integer (smooth integrand).
fn bessel_j_fixed_panels(nu: f64, r: f64) -> Result<f64> {
    let pre = poisson_prefactor(nu, r)?;
    let f = |t: f64| Complex64::new((r * t.sin()).cos() * t.cos().max(0.0).powf(2.0 * nu), 0.0);
    let h = FRAC_PI_2 / 8.0;
    let mut sum = 0.0;
    for i in 0..8 {
        sum += gk21(&f, i as f64 * h, (i + 1) as f64 * h).0.re;
    }
    Ok(pre * sum)
}

/// J_ν for the hot loops of the radial propagator: Hankel expansion for
/// r ≥ 25, fixed panels for half-integer-spaced orders below, and the
/// adaptive Poisson integral otherwise.
pub fn bessel_j_fast(order: BesselOrder, r: f64) -> Result<f64> {
    let r = r.abs();
    if r >= 25.0 {
        bessel_j_asymptotic(order, r)
    } else if r == 0.0 {
        bessel_j(order, 0.0)
    } else if order.has_integer_weight() {
        bessel_j_fixed_panels(order.nu, r)
    } else {
        bessel_j(order, r)
    }
}

/// R_ν(r) = J_ν(r) − √(2/(πr)) cos(r − πν/2 − π/4), for r ≥ 1.
pub fn bessel_remainder(order: BesselOrder, r: f64) -> Result<Complex64> {
    if !(r >= 1.0) {
        return Err(LabError::DomainError(format!("remainder needs r >= 1, got {r}")));
    }
    let j = bessel_j(order, r)?;
    let lead = (2.0 / (PI * r)).sqrt() * (r - 0.5 * PI * order.nu - FRAC_PI_4).cos();
    Ok(Complex64::new(j - lead, 0.0))
}

/// Below this radius the transform is replaced by its limit at the origin.
const ORIGIN_CUTOFF: f64 = 1e-8;

/// Total measure of the unit sphere in ℝⁿ (two points for n = 1).
pub fn sphere_measure(n: usize) -> Result<f64> {
    match n {
        1 => Ok(2.0),
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        _ => Err(LabError::UnsupportedDimension(n)),
    }
}

/// dσ̂(ρ) = (2π)^{n/2} ρ^{−(n−2)/2} J_{(n−2)/2}(ρ) for the unit sphere in ℝⁿ,
/// n ∈ {2, 3}.
pub fn sphere_ft(n: usize, rho: f64) -> Result<f64> {
    if n != 2 && n != 3 {
        return Err(LabError::UnsupportedDimension(n));
    }
    sphere_ft_any(n, rho)
}

/// [`sphere_ft`] extended to n = 1, where the "sphere" is {±1} and the
/// transform is 2 cos ρ.
pub fn sphere_ft_any(n: usize, rho: f64) -> Result<f64> {
    let rho = rho.abs();
    match n {
        1 => Ok(2.0 * rho.cos()),
        2 | 3 => {
            if rho < ORIGIN_CUTOFF {
                return sphere_measure(n);
            }
            let nu = 0.5 * (n as f64 - 2.0);
            let j = bessel_j_fast(BesselOrder::new(nu)?, rho)?;
            Ok((2.0 * PI).powf(0.5 * n as f64) * rho.powf(-nu) * j)
        }
        _ => Err(LabError::UnsupportedDimension(n)),
    }
}

/// Leading oscillation and defect of dσ̂:
/// dσ̂(ρ) = ρ^{−(n−1)/2}(C₁e^{iρ} + C₂e^{−iρ}) + remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSplit {
    pub c1: Complex64,
    pub c2: Complex64,
    /// ρ^{−(n−1)/2}(C₁e^{iρ} + C₂e^{−iρ}), real.
    pub leading: f64,
    pub remainder: f64,
}

pub fn sphere_split_coefficients(n: usize) -> (Complex64, Complex64) {
    let m = n as f64 - 1.0;
    let c1 = Complex64::from_polar((2.0 * PI).powf(0.5 * m), -FRAC_PI_4 * m);
    (c1, c1.conj())
}

pub fn sphere_ft_split(n: usize, rho: f64) -> Result<SphereSplit> {
    if n != 2 && n != 3 {
        return Err(LabError::UnsupportedDimension(n));
    }
    if !(rho >= 1.0) {
        return Err(LabError::DomainError(format!("split needs rho >= 1, got {rho}")));
    }
    let (c1, c2) = sphere_split_coefficients(n);
    let osc = c1 * Complex64::from_polar(1.0, rho) + c2 * Complex64::from_polar(1.0, -rho);
    let leading = rho.powf(-0.5 * (n as f64 - 1.0)) * osc.re;
    let full = sphere_ft(n, rho)?;
    Ok(SphereSplit {
        c1,
        c2,
        leading,
        remainder: full - leading,
    })
}

/// max |R_ν| over one period [r, r + 2π] (64 samples).
pub fn remainder_envelope(order: BesselOrder, r: f64) -> Result<f64> {
    (0..64).try_fold(0.0f64, |acc, i| {
        Ok(acc.max(bessel_remainder(order, r + 2.0 * PI * i as f64 / 64.0)?.norm()))
    })
}

/// Remainder envelope slope −3/2 for each order over `r_sweep`, the closed
/// form J_{1/2}(r) = √(2/(πr)) sin r, and ρ·dσ̂₃(ρ) = 4π sin ρ on [0.1, 100].
pub fn bessel_experiment(orders: &[f64], r_sweep: &[f64]) -> Result<ExperimentReport> {
    if r_sweep.iter().any(|&r| !(r >= 1.0)) {
        return Err(LabError::DomainError("remainder sweep needs r >= 1".into()));
    }
    let mut report = ExperimentReport::new("bessel");
    report.echo("orders", format!("{orders:?}"));
    for &nu in orders {
        let order = BesselOrder::new(nu)?;
        let quantity = format!("remainder_envelope:nu={nu}");
        for &r in r_sweep {
            report.push(Record::new(&quantity, r, remainder_envelope(order, r)?));
        }
        report.slope_claim(&format!("remainder slope nu = {nu}"), &quantity, -1.5, Comparison::Within, 0.1)?;
    }
    let half = BesselOrder::new(0.5)?;
    let mut worst_half = 0.0f64;
    let mut worst_sphere = 0.0f64;
    for i in 0..=400 {
        let r = 0.1 + (100.0 - 0.1) * i as f64 / 400.0;
        let closed = (2.0 / (PI * r)).sqrt() * r.sin();
        worst_half = worst_half.max((bessel_j(half, r)? - closed).abs());
        worst_sphere = worst_sphere.max((sphere_ft(3, r)? * r - 4.0 * PI * r.sin()).abs());
    }
    report.push(Record::new("j_half_max_error", 100.0, worst_half));
    report.push(Record::new("sphere3_max_error", 100.0, worst_sphere));
    report.check("J_{1/2} closed form", worst_half, 0.0, Comparison::AtMost, 1e-9);
    report.check("rho * sphere_ft(3, rho) = 4 pi sin rho", worst_sphere, 0.0, Comparison::AtMost, 1e-8);
    Ok(report)
}
