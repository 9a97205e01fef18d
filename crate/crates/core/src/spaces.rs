//! Spectral profiles, Bessel potential norms ‖ℱ⁻¹((1+|ξ|²)^{s/2} f̂)‖_p,
//! weak-Lᵖ quasinorms and the regularity-index formulas.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::{dft_inverse, integrate_oscillatory_with, GridSpec, OscillatoryOptions, PolyPhase, SampledField};
use crate::special::{sphere_ft_any, sphere_measure};

pub type RadialFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type ExplicitFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum ProfileKind {
    /// f̂(ξ) = g(|ξ|).
    Radial(RadialFn),
    /// f̂(ξ) given pointwise.
    Explicit(ExplicitFn),
}

/// Where f̂ lives. `Gaussian { width }` means |f̂(ξ)| ≤ C e^{−|ξ|²/(2 width²)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Interval { lo: f64, hi: f64 },
    Gaussian { width: f64 },
}

impl Support {
    /// Radius beyond which the profile is negligible (≤ 1e−16 relative).
    pub fn outer_radius(&self) -> f64 {
        match *self {
            Support::Ball { radius } => radius,
            Support::Annulus { outer, .. } => outer,
            Support::Interval { lo, hi } => lo.abs().max(hi.abs()),
            Support::Gaussian { width } => 8.6 * width,
        }
    }

    pub fn inner_radius(&self) -> f64 {
        match *self {
            Support::Annulus { inner, .. } => inner,
            Support::Interval { lo, .. } if lo > 0.0 => lo,
            Support::Interval { hi, .. } if hi < 0.0 => -hi,
            _ => 0.0,
        }
    }
}

/// Closed-form description of a Fourier transform f̂. The full transform is
/// base(ξ)·e^{i·chirp·|ξ|²}; the chirp is kept separate so that integrators
/// can fold it into the phase instead of the amplitude.
#[derive(Clone)]
pub struct SpectralProfile {
    pub dimension: usize,
    pub kind: ProfileKind,
    pub support: Support,
    pub chirp: f64,
    pub smoothness: String,
}

impl std::fmt::Debug for SpectralProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralProfile")
            .field("dimension", &self.dimension)
            .field(
                "kind",
                &match self.kind {
                    ProfileKind::Radial(_) => "radial",
                    ProfileKind::Explicit(_) => "explicit",
                },
            )
            .field("support", &self.support)
            .field("chirp", &self.chirp)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl SpectralProfile {
    pub fn radial<G>(dimension: usize, g: G, support: Support) -> Result<Self>
    where
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(1..=3).contains(&dimension) {
            return Err(LabError::UnsupportedDimension(dimension));
        }
        if matches!(support, Support::Interval { .. }) {
            return Err(LabError::InvalidInput("radial profiles need ball, annulus or Gaussian support".into()));
        }
        Ok(Self {
            dimension,
            kind: ProfileKind::Radial(Arc::new(g)),
            support,
            chirp: 0.0,
            smoothness: "smooth".into(),
        })
    }

    pub fn explicit<F>(dimension: usize, f: F, support: Support) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        if !(1..=3).contains(&dimension) {
            return Err(LabError::UnsupportedDimension(dimension));
        }
        if matches!(support, Support::Interval { .. }) && dimension != 1 {
            return Err(LabError::InvalidInput("interval support is one-dimensional".into()));
        }
        Ok(Self {
            dimension,
            kind: ProfileKind::Explicit(Arc::new(f)),
            support,
            chirp: 0.0,
            smoothness: "smooth".into(),
        })
    }

    pub fn with_chirp(mut self, chirp: f64) -> Self {
        self.chirp = chirp;
        self
    }

    pub fn with_smoothness(mut self, note: &str) -> Self {
        self.smoothness = note.to_string();
        self
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.kind, ProfileKind::Radial(_))
    }

    /// base(ξ), without the chirp factor.
    pub fn base(&self, xi: &[f64]) -> Complex64 {
        match &self.kind {
            ProfileKind::Radial(g) => g(norm(xi)),
            ProfileKind::Explicit(f) => f(xi),
        }
    }

    /// The radial base profile g(r), r ≥ 0.
    pub fn radial_base(&self, r: f64) -> Option<Complex64> {
        match &self.kind {
            ProfileKind::Radial(g) => Some(g(r)),
            ProfileKind::Explicit(_) => None,
        }
    }

    /// f̂(ξ) including the chirp.
    pub fn value(&self, xi: &[f64]) -> Complex64 {
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        self.base(xi) * Complex64::from_polar(1.0, self.chirp * r2)
    }

    /// Per-axis box that contains the support.
    pub fn support_box(&self) -> Vec<(f64, f64)> {
        match self.support {
            Support::Interval { lo, hi } => vec![(lo, hi)],
            s => vec![(-s.outer_radius(), s.outer_radius()); self.dimension],
        }
    }

    /// Samples points just outside the declared support and checks that the
    /// profile is negligible there (≤ 1e−12 of its peak on the support).
    pub fn check_support(&self, samples: usize) -> Result<()> {
        let samples = samples.max(8);
        let bx = self.support_box();
        let n = self.dimension;
        let mut peak = 0.0f64;
        let mut outside = 0.0f64;
        for i in 0..samples {
            let u = (i as f64 + 0.5) / samples as f64;
            // Along a diagonal of the box and beyond it.
            let inside: Vec<f64> = bx.iter().map(|&(a, b)| a + (b - a) * u).collect();
            let mut ray = vec![0.0; n];
            ray[0] = 1.0;
            let r_in = if matches!(self.support, Support::Interval { .. }) {
                0.0
            } else {
                self.support.outer_radius() * u
            };
            let probe_in: Vec<f64> = if matches!(self.support, Support::Interval { .. }) {
                inside
            } else {
                ray.iter().map(|v| v * r_in).collect()
            };
            peak = peak.max(self.base(&probe_in).norm());
            let probe_out: Vec<f64> = match self.support {
                Support::Interval { lo, hi } => {
                    let w = hi - lo;
                    vec![if i % 2 == 0 { hi + w * u * 1.0001 + 1e-9 } else { lo - w * u * 1.0001 - 1e-9 }]
                }
                Support::Gaussian { .. } => ray.iter().map(|v| v * self.support.outer_radius() * (1.0 + u)).collect(),
                s => {
                    let r_out = if i % 2 == 0 || s.inner_radius() == 0.0 {
                        s.outer_radius() * (1.0 + 1e-9 + u)
                    } else {
                        s.inner_radius() * u * (1.0 - 1e-9)
                    };
                    ray.iter().map(|v| v * r_out).collect()
                }
            };
            outside = outside.max(self.base(&probe_out).norm());
        }
        if outside > 1e-12 * peak.max(1e-300) {
            return Err(LabError::InvalidInput(format!(
                "profile is {outside:e} outside its declared support (peak {peak:e})"
            )));
        }
        Ok(())
    }

    fn map_base<F>(&self, factor: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    {
        let kind = match &self.kind {
            ProfileKind::Radial(g) => {
                let g = g.clone();
                let f = factor.clone();
                ProfileKind::Radial(Arc::new(move |r| g(r) * f(r)))
            }
            ProfileKind::Explicit(h) => {
                let h = h.clone();
                ProfileKind::Explicit(Arc::new(move |xi: &[f64]| h(xi) * factor(norm(xi))))
            }
        };
        Self {
            kind,
            ..self.clone()
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Multiplies f̂ by (1+|ξ|²)^{s/2}.
pub fn bessel_multiplier(profile: &SpectralProfile, s: f64) -> SpectralProfile {
    if s == 0.0 {
        return profile.clone();
    }
    profile.map_base(move |r| (1.0 + r * r).powf(0.5 * s))
}

/// Trapezoid weights of the grid nodes that fall inside `[lo, hi]` on one axis.
fn axis_weights(grid: &GridSpec, axis: usize, lo: f64, hi: f64) -> Vec<f64> {
    let h = grid.spacing(axis);
    let slack = 1e-9 * h;
    let inside: Vec<bool> = grid
        .axis_points(axis)
        .iter()
        .map(|&x| x >= lo - slack && x <= hi + slack)
        .collect();
    let first = inside.iter().position(|&b| b);
    let last = inside.iter().rposition(|&b| b);
    let mut w = vec![0.0; inside.len()];
    if let (Some(f), Some(l)) = (first, last) {
        if f == l {
            w[f] = h;
        } else {
            for (i, wi) in w.iter_mut().enumerate().take(l + 1).skip(f) {
                *wi = if i == f || i == l { 0.5 * h } else { h };
            }
        }
    }
    w
}

fn node_weights(grid: &GridSpec, domain: &[(f64, f64)]) -> Result<Vec<f64>> {
    let n = grid.dimension();
    if domain.len() != n {
        return Err(LabError::InvalidInput("domain dimension differs from grid".into()));
    }
    let mut per_axis = Vec::with_capacity(n);
    for (axis, &(lo, hi)) in domain.iter().enumerate() {
        let (a, b) = grid.extents[axis];
        let slack = 1e-9 * grid.spacing(axis);
        if !(lo < hi) || lo < a - slack || hi > b + slack {
            return Err(LabError::DomainOutsideGrid);
        }
        per_axis.push(axis_weights(grid, axis, lo, hi));
    }
    Ok((0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            (0..n).map(|axis| per_axis[axis][idx[axis]]).product()
        })
        .collect())
}

/// (∫_domain |F|ᵖ)^{1/p} by the trapezoid rule on the grid nodes in `domain`.
pub fn lp_norm(field: &SampledField, p: f64, domain: &[(f64, f64)]) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::OutOfRange(format!("p must be in [1, inf), got {p}")));
    }
    let w = node_weights(&field.grid, domain)?;
    let sum: f64 = field
        .values
        .iter()
        .zip(&w)
        .map(|(v, wi)| wi * v.norm().powf(p))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// Whole-grid domain of a field.
pub fn full_domain(grid: &GridSpec) -> Vec<(f64, f64)> {
    grid.extents.clone()
}

/// sup_α α·|{x ∈ domain : |F(x)| > α}|^{1/p}, with α ranging over the
/// sampled moduli (approached from below) and the same node weights as
/// [`lp_norm`], so weak ≤ strong holds exactly on every sample.
pub fn weak_lp_quasinorm(field: &SampledField, p: f64, domain: &[(f64, f64)]) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::OutOfRange(format!("p must be in [1, inf), got {p}")));
    }
    let w = node_weights(&field.grid, domain)?;
    let mut pairs: Vec<(f64, f64)> = field
        .values
        .iter()
        .zip(&w)
        .filter(|(_, &wi)| wi > 0.0)
        .map(|(v, &wi)| (v.norm(), wi))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut measure = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let level = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == level {
            measure += pairs[i].1;
            i += 1;
        }
        best = best.max(level * measure.powf(1.0 / p));
    }
    Ok(best)
}

/// ‖f‖_{L^p_s} = ‖ℱ⁻¹((1+|ξ|²)^{s/2} f̂)‖_p.
///
/// Explicit profiles use the DFT on the dual of the spatial `grid`. Radial
/// profiles take `grid` as a one-dimensional radial grid [0, R] and invert
/// point by point through dσ̂. Either way the extent is doubled once and the
/// norm must move by less than 1%.
pub fn bessel_potential_norm(profile: &SpectralProfile, s: f64, p: f64, grid: &GridSpec) -> Result<f64> {
    let m = bessel_multiplier(profile, s);
    let radial_grid = grid.dimension() == 1 && grid.extents[0].0 == 0.0;
    let (small, large) = if m.is_radial() && radial_grid {
        radial_norm_pair(&m, p, grid)?
    } else {
        let a = grid_norm(&m, p, grid)?;
        let b = grid_norm(&m, p, &doubled(grid)?)?;
        (a, b)
    };
    let change = (large - small).abs() / large.max(1e-300);
    if change > 0.01 {
        return Err(LabError::TailTooFat {
            relative_change: change,
        });
    }
    Ok(large)
}

/// Same spacing, twice the extent about the same center.
fn doubled(grid: &GridSpec) -> Result<GridSpec> {
    let extents = grid
        .extents
        .iter()
        .map(|&(a, b)| {
            let w = b - a;
            (a - 0.5 * w, b + 0.5 * w)
        })
        .collect();
    let counts = grid.counts.iter().map(|&c| 2 * c - 1).collect();
    GridSpec::new(extents, counts)
}

/// Spatial field ℱ⁻¹(f̂) on `grid`, via the DFT of samples on the dual grid.
pub fn inverse_transform_on_grid(profile: &SpectralProfile, grid: &GridSpec) -> Result<SampledField> {
    let n = grid.dimension();
    if n != profile.dimension {
        return Err(LabError::InvalidInput("grid and profile dimensions differ".into()));
    }
    let mut dual_extents = Vec::with_capacity(n);
    for axis in 0..n {
        let count = grid.counts[axis];
        let step = 2.0 * PI / (count as f64 * grid.spacing(axis));
        let start = -((count / 2) as f64) * step;
        dual_extents.push((start, start + (count - 1) as f64 * step));
    }
    for (axis, &(lo, hi)) in profile.support_box().iter().enumerate() {
        let (a, b) = dual_extents[axis];
        if lo < a || hi > b {
            return Err(LabError::InvalidInput(format!(
                "grid spacing too coarse: frequencies [{lo}, {hi}] exceed the dual range [{a}, {b}]"
            )));
        }
    }
    let dual = GridSpec::new(dual_extents, grid.counts.clone())?;
    let mut spectrum = SampledField::from_fn(dual, |xi| profile.value(xi))?;
    spectrum.conjugate_origin = Some(grid.extents.iter().map(|e| e.0).collect());
    dft_inverse(&spectrum)
}

fn grid_norm(profile: &SpectralProfile, p: f64, grid: &GridSpec) -> Result<f64> {
    let field = inverse_transform_on_grid(profile, grid)?;
    lp_norm(&field, p, &full_domain(&field.grid))
}

/// F(ρ) = (2π)^{−n} ∫ g(r) e^{i·chirp·r²} r^{n−1} dσ̂(rρ) dr for a radial profile.
pub fn radial_inverse(profile: &SpectralProfile, rho: f64, rel_tol: f64) -> Result<Complex64> {
    let ProfileKind::Radial(g) = &profile.kind else {
        return Err(LabError::InvalidInput("radial inverse needs a radial profile".into()));
    };
    let n = profile.dimension;
    let (lo, hi) = (profile.support.inner_radius(), profile.support.outer_radius());
    let phase = PolyPhase::new(vec![0.0, 0.0, profile.chirp]);
    let g = g.clone();
    // Sup of |F| is at most scale·∫|g| r^{n−1}; the tolerance is relative to that.
    let cells = 512;
    let h = (hi - lo) / cells as f64;
    let mass: f64 = (0..cells)
        .map(|i| {
            let r = lo + (i as f64 + 0.5) * h;
            g(r).norm() * r.powi(n as i32 - 1) * h
        })
        .sum();
    let amp = move |r: f64| g(r) * r.powi(n as i32 - 1) * sphere_ft_any(n, r * rho).unwrap_or(f64::NAN);
    let abs_tol = (rel_tol * mass * sphere_measure(n)?).max(1e-300);
    let opts = OscillatoryOptions::absolute(abs_tol).with_amplitude_rate(rho);
    let q = integrate_oscillatory_with(&phase, amp, 1.0, (lo, hi), &opts)?;
    Ok(q.value * (2.0 * PI).powi(-(n as i32)))
}

fn radial_lp(values: &[Complex64], step: f64, n: usize, p: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        let rho = i as f64 * step;
        let w = if i == 0 || i + 1 == values.len() { 0.5 } else { 1.0 };
        sum += w * v.norm().powf(p) * rho.powi(n as i32 - 1);
    }
    if n == 2 {
        // |F|ᵖρ is odd at the origin; Euler–Maclaurin end correction.
        sum += step / 12.0 * values[0].norm().powf(p);
    }
    Ok((sphere_measure(n)? * sum * step).powf(1.0 / p))
}

fn radial_norm_pair(profile: &SpectralProfile, p: f64, grid: &GridSpec) -> Result<(f64, f64)> {
    if grid.dimension() != 1 || grid.extents[0].0 != 0.0 {
        return Err(LabError::InvalidInput("radial norms need a radial grid [0, R]".into()));
    }
    let count = grid.counts[0];
    let step = grid.spacing(0);
    let nodes: Vec<f64> = (0..2 * count - 1).map(|i| i as f64 * step).collect();
    let values: Vec<Complex64> = nodes
        .par_iter()
        .map(|&rho| radial_inverse(profile, rho, 1e-10))
        .collect::<Result<_>>()?;
    let n = profile.dimension;
    Ok((radial_lp(&values[..count], step, n, p)?, radial_lp(&values, step, n, p)?))
}

/// Regularity threshold s at exponent p in dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityIndex {
    pub n: usize,
    pub p: f64,
    pub s: f64,
}

impl RegularityIndex {
    /// Threshold from [`index_low`] for p ≤ 2 and [`index_high`] above.
    pub fn threshold(n: usize, p: f64) -> Result<Self> {
        let s = if p <= 2.0 { index_low(n, p)? } else { index_high(n, p)? };
        Ok(Self { n, p, s })
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(LabError::OutOfRange("dimension must be at least 1".into()));
    }
    Ok(())
}

/// s(p) = n(1/p − 1/2) + (n/(n+1))(1 − 1/p) on 1 ≤ p ≤ 2.
pub fn index_low(n: usize, p: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(1.0..=2.0).contains(&p) {
        return Err(LabError::OutOfRange(format!("index_low needs 1 <= p <= 2, got {p}")));
    }
    let n = n as f64;
    Ok(n * (1.0 / p - 0.5) + n / (n + 1.0) * (1.0 - 1.0 / p))
}

/// p_n(k) = 6 / (2n + (k−1) ∏_{i=k}^{n} 2i/(2i+1)), 2 ≤ k ≤ n.
pub fn p_star(n: usize, k: usize) -> Result<f64> {
    if !(2 <= k && k <= n) {
        return Err(LabError::OutOfRange(format!("p_star needs 2 <= k <= n, got n={n}, k={k}")));
    }
    let product: f64 = (k..=n).map(|i| 2.0 * i as f64 / (2.0 * i as f64 + 1.0)).product();
    Ok(6.0 / (2.0 * n as f64 + (k as f64 - 1.0) * product))
}

/// min_{2≤k≤n} p_n(k). For n = 1 the admissible range is empty; the formula
/// read at k = n = 1 (where the (k−1) factor vanishes) gives 6/(2n) = 3.
pub fn p_n_min(n: usize) -> Result<f64> {
    check_dimension(n)?;
    if n == 1 {
        return Ok(3.0);
    }
    let mut best = f64::INFINITY;
    for k in 2..=n {
        best = best.min(p_star(n, k)?);
    }
    Ok(best)
}

/// n(1−2/p) for p > 2+p_n, plus (n/(n+1))(2+p_n−p)/(p·p_n) on [2, 2+p_n].
pub fn index_high(n: usize, p: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(p >= 2.0) {
        return Err(LabError::OutOfRange(format!("index_high needs p >= 2, got {p}")));
    }
    let pn = p_n_min(n)?;
    let nf = n as f64;
    let base = if p.is_infinite() { nf } else { nf * (1.0 - 2.0 / p) };
    if p > 2.0 + pn {
        Ok(base)
    } else {
        Ok(base + nf / (nf + 1.0) * (2.0 + pn - p) / (p * pn))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::unit_bump;

    fn unit_cube(n: usize, count: usize) -> GridSpec {
        GridSpec::cube(n, 0.0, 1.0, count).unwrap()
    }

    #[test]
    fn constant_has_unit_norm() {
        for n in 1..=3 {
            let g = unit_cube(n, 11);
            let f = SampledField::from_fn(g.clone(), |_| Complex64::new(1.0, 0.0)).unwrap();
            for p in [1.0, 2.0, 3.5] {
                assert!((lp_norm(&f, p, &full_domain(&g)).unwrap() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn half_indicator() {
        let g = unit_cube(1, 2001);
        let f = SampledField::from_fn(g.clone(), |x| Complex64::new(if x[0] < 0.5 { 1.0 } else { 0.0 }, 0.0))
            .unwrap();
        let v = lp_norm(&f, 2.0, &full_domain(&g)).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn gaussian_l2() {
        let g = GridSpec::new(vec![(-10.0, 10.0)], vec![2001]).unwrap();
        let f = SampledField::from_fn(g.clone(), |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0)).unwrap();
        let v = lp_norm(&f, 2.0, &full_domain(&g)).unwrap();
        assert!((v - PI.powf(0.25)).abs() < 1e-6);
    }

    #[test]
    fn domain_outside_grid() {
        let g = unit_cube(1, 11);
        let f = SampledField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(lp_norm(&f, 2.0, &[(0.0, 2.0)]), Err(LabError::DomainOutsideGrid));
        assert_eq!(weak_lp_quasinorm(&f, 2.0, &[(-1.0, 0.5)]), Err(LabError::DomainOutsideGrid));
    }

    #[test]
    fn weak_norm_of_indicator() {
        let g = GridSpec::new(vec![(0.0, 4.0)], vec![401]).unwrap();
        let f = SampledField::from_fn(g.clone(), |x| {
            Complex64::new(if x[0] > 1.0 && x[0] < 2.5 { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        for p in [1.0, 2.0, 4.0] {
            let v = weak_lp_quasinorm(&f, p, &full_domain(&g)).unwrap();
            assert!((v - 1.5f64.powf(1.0 / p)).abs() < 0.02, "p={p}: {v}");
        }
    }

    #[test]
    fn multiplier_identity_and_group_law() {
        let prof = SpectralProfile::radial(2, |r| Complex64::new(unit_bump(r - 2.0), 0.0), Support::Annulus {
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        let same = bessel_multiplier(&prof, 0.0);
        let back = bessel_multiplier(&bessel_multiplier(&prof, 0.7), -0.7);
        for i in 0..50 {
            let xi = [0.06 * i as f64, 0.03 * i as f64];
            assert_eq!(same.value(&xi), prof.value(&xi));
            assert!((back.value(&xi) - prof.value(&xi)).norm() < 1e-12);
        }
        let k = 6;
        let r = 2f64.powi(k);
        let thin = SpectralProfile::radial(2, move |x| Complex64::new(unit_bump((x - r) / 0.5), 0.0), Support::Annulus {
            inner: r - 0.5,
            outer: r + 0.5,
        })
        .unwrap();
        let scaled = bessel_multiplier(&thin, 0.6);
        let ratio = scaled.value(&[r, 0.0]).re / thin.value(&[r, 0.0]).re;
        assert!((ratio / 2f64.powf(0.6 * k as f64) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn support_metadata_is_checked() {
        let good = SpectralProfile::explicit(1, |x: &[f64]| Complex64::new(unit_bump(x[0] - 3.0), 0.0), Support::Interval {
            lo: 2.0,
            hi: 4.0,
        })
        .unwrap();
        assert!(good.check_support(200).is_ok());
        let bad = SpectralProfile::explicit(1, |x: &[f64]| Complex64::new(unit_bump(x[0] / 3.0), 0.0), Support::Interval {
            lo: -1.0,
            hi: 1.0,
        })
        .unwrap();
        assert!(bad.check_support(200).is_err());
    }

    #[test]
    fn gaussian_norm_with_zero_smoothness() {
        // f̂ = √(2π) e^{−ξ²/2} ⇒ f = e^{−x²/2}, ‖f‖₂ = π^{1/4}.
        let prof = SpectralProfile::explicit(
            1,
            |x: &[f64]| Complex64::new((2.0 * PI).sqrt() * (-0.5 * x[0] * x[0]).exp(), 0.0),
            Support::Gaussian { width: 1.0 },
        )
        .unwrap();
        let grid = GridSpec::new(vec![(-20.0, 20.0)], vec![512]).unwrap();
        let v = bessel_potential_norm(&prof, 0.0, 2.0, &grid).unwrap();
        assert!((v - PI.powf(0.25)).abs() < 1e-6);
        // H¹ norm: ‖f‖² = (2π)^{-1}∫(1+ξ²)2πe^{−ξ²} = √π·3/2.
        let v1 = bessel_potential_norm(&prof, 1.0, 2.0, &grid).unwrap();
        assert!((v1 - (1.5 * PI.sqrt()).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn radial_and_grid_routes_agree() {
        let prof = SpectralProfile::radial(2, |r| Complex64::new(unit_bump(r - 2.0), 0.0), Support::Annulus {
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        let radial = bessel_potential_norm(&prof, 0.5, 2.0, &GridSpec::new(vec![(0.0, 40.0)], vec![801]).unwrap())
            .unwrap();
        let grid = bessel_potential_norm(&prof, 0.5, 2.0, &GridSpec::cube(2, -40.0, 40.0, 128).unwrap()).unwrap();
        assert!((radial - grid).abs() < 1e-4 * grid, "{radial} vs {grid}");
        // Plancherel: ‖F‖₂² = (2π)^{-2}∫(1+r²)^{1/2}|g|² 2πr dr.
        let plancherel = crate::numerics::integrate_adaptive(
            |r| Complex64::new((1.0 + r * r).sqrt() * unit_bump(r - 2.0).powi(2) * r / (2.0 * PI), 0.0),
            1.0,
            3.0,
            1e-13,
        )
        .unwrap()
        .value
        .re
        .sqrt();
        assert!((grid - plancherel).abs() < 1e-6 * plancherel);
    }

    #[test]
    fn fat_tails_are_reported() {
        let prof = SpectralProfile::explicit(
            1,
            |x: &[f64]| Complex64::new((2.0 * PI).sqrt() * 4.0 * (-8.0 * x[0] * x[0]).exp(), 0.0),
            Support::Gaussian { width: 0.25 },
        )
        .unwrap();
        let grid = GridSpec::new(vec![(-3.0, 3.0)], vec![64]).unwrap();
        let r = bessel_potential_norm(&prof, 0.0, 2.0, &grid);
        assert!(matches!(
            r,
            Err(LabError::TailTooFat { .. })
        ), "{r:?}");
    }

    #[test]
    fn index_values() {
        for n in 1..=5 {
            let nf = n as f64;
            assert_eq!(index_low(n, 2.0).unwrap(), nf / (2.0 * nf + 2.0));
            assert!((index_low(n, 1.0).unwrap() - nf / 2.0).abs() < 1e-15);
        }
        assert!((index_low(1, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((p_star(2, 2).unwrap() - 1.25).abs() < 1e-15);
        assert!(p_star(3, 1).is_err());
        assert!(p_star(3, 4).is_err());
        assert!(index_low(2, 2.5).is_err());
        assert!(index_high(2, 1.5).is_err());
    }

    #[test]
    fn single_factor_product() {
        for n in 2..7 {
            let nf = n as f64;
            let want = 6.0 / (2.0 * nf + (nf - 1.0) * 2.0 * nf / (2.0 * nf + 1.0));
            assert!((p_star(n, n).unwrap() - want).abs() < 1e-15);
            for k in 2..=n {
                assert!(p_n_min(n).unwrap() <= p_star(n, k).unwrap());
            }
        }
    }
}
