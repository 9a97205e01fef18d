//! Independent oracles for the kernel and the propagator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schrolab::numerics::{integrate_adaptive, integrate_panels, QuadratureOptions};
use schrolab::propagator::{evolve_radial, evolve_spectral, gaussian_evolution, gaussian_profile, kernel_k};
use schrolab::smooth::unit_bump;
use schrolab::spaces::{SpectralProfile, Support};
use schrolab::special::gamma_fn;

/// Subordination: (1+|ξ|²)^{−s/2} = Γ(s/2)^{−1}∫_0^∞ u^{s/2−1}e^{−u}e^{−u|ξ|²}du,
/// so K = Γ(s/2)^{−1}∫ u^{s/2−1}e^{−u}(4π(u+it))^{−n/2}e^{−|z|²/(4(u+it))}du.
/// With u = v^{2/s} the weight becomes (2/s)dv and the integrand is smooth.
fn kernel_by_subordination(s: f64, t: f64, z: f64, n: usize) -> Complex64 {
    let heat = |u: f64| {
        let w = Complex64::new(u, t);
        (4.0 * PI * w).powf(-0.5 * n as f64) * (-(z * z) / (4.0 * w)).exp()
    };
    let f = |v: f64| {
        let u = v.powf(2.0 / s);
        heat(u) * (-u).exp()
    };
    let top = 40f64.powf(0.5 * s);
    let breaks: Vec<f64> = (0..=400).map(|i| top * i as f64 / 400.0).collect();
    let q = integrate_panels(&f, &breaks, &QuadratureOptions::absolute(1e-13)).unwrap();
    q.value * (2.0 / s) / gamma_fn(0.5 * s).unwrap()
}

/// K^ε = (2π)^{−1}∫ e^{izξ − (it+ε)ξ²}(1+ξ²)^{−s/2} dξ in one dimension.
fn regularized_kernel_1d(s: f64, t: f64, z: f64, eps: f64) -> Complex64 {
    let reach = (40.0 / eps).sqrt();
    // Even integrand: twice the half-line integral of the cosine part.
    let f = |xi: f64| {
        Complex64::new(-eps * xi * xi, -t * xi * xi).exp() * (2.0 * (z * xi).cos() * (1.0 + xi * xi).powf(-0.5 * s))
    };
    let panels = ((reach * reach * t + z * reach) / PI).ceil().max(64.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| reach * i as f64 / panels as f64).collect();
    let q = integrate_panels(&f, &breaks, &QuadratureOptions::absolute(1e-12)).unwrap();
    q.value / (2.0 * PI)
}

#[test]
fn kernel_matches_subordination() {
    for &(s, t, z, n) in &[
        (0.75, 0.1, 0.5, 1),
        (0.75, 0.01, 2.0, 1),
        (1.5, 0.3, 1.0, 1),
        (1.2, 0.05, 0.3, 2),
        (1.2, 0.2, 3.0, 2),
        (2.5, 0.5, 1.0, 2),
    ] {
        let mut point = vec![0.0; n];
        point[0] = z;
        let k = kernel_k(s, t, &point, n).unwrap();
        let oracle = kernel_by_subordination(s, t, z, n);
        assert!(
            (k - oracle).norm() < 1e-6 * oracle.norm(),
            "s={s} t={t} z={z} n={n}: {k} vs {oracle}"
        );
    }
}

#[test]
fn kernel_matches_regularized_limit() {
    for &(s, t, z) in &[(0.75, 0.2, 0.5), (1.5, 0.4, 1.5)] {
        let k = kernel_k(s, t, &[z], 1).unwrap();
        let e = [4e-4, 2e-4, 1e-4];
        let v: Vec<Complex64> = e.iter().map(|&eps| regularized_kernel_1d(s, t, z, eps)).collect();
        // K^ε = K + aε + bε² + …; two Richardson steps at ratio 2.
        let r1 = [2.0 * v[1] - v[0], 2.0 * v[2] - v[1]];
        let limit = (4.0 * r1[1] - r1[0]) / 3.0;
        assert!((k - limit).norm() < 1e-5 * k.norm(), "s={s} t={t} z={z}: {k} vs {limit}");
        // The unextrapolated value is visibly further off.
        assert!((k - v[2]).norm() > (k - limit).norm());
    }
}

#[test]
fn radial_and_spectral_routes_agree() {
    let profile = SpectralProfile::radial(
        2,
        |r| Complex64::new(unit_bump((r - 2.0) / 1.5), 0.0),
        Support::Annulus { inner: 0.5, outer: 3.5 },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let t = rng.gen_range(0.0..1.0);
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let a = evolve_spectral(&profile, t, &x).unwrap();
        let b = evolve_radial(&profile, t, (x[0] * x[0] + x[1] * x[1]).sqrt()).unwrap();
        assert!((a - b).norm() < 1e-6 * b.norm().max(1e-3), "t={t} x={x:?}: {a} vs {b}");
    }
}

#[test]
fn gaussian_closed_form_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=2 {
        let profile = gaussian_profile(n).unwrap();
        for _ in 0..20 {
            let t = rng.gen_range(0.0..1.0);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let got = evolve_spectral(&profile, t, &x).unwrap();
            let want = gaussian_evolution(n, t, &x);
            assert!((got - want).norm() < 1e-6 * want.norm(), "n={n} t={t} x={x:?}");
        }
    }
}

#[test]
fn subordination_oracle_reduces_to_bessel_kernel_at_zero_time_limit() {
    // Sanity check of the oracle itself: as t → 0, K_{2,t} → e^{−|z|}/2 in 1D.
    let k = kernel_by_subordination(2.0, 1e-6, 0.7, 1);
    assert!((k - Complex64::new(0.5 * (-0.7f64).exp(), 0.0)).norm() < 1e-4, "{k}");
    // And ∫ u^{s/2−1}e^{−u}du = Γ(s/2) is what the weight integrates to.
    let s = 0.75;
    let w = integrate_adaptive(|v: f64| Complex64::new((-v.powf(2.0 / s)).exp() * 2.0 / s, 0.0), 0.0, 20.0, 1e-13)
        .unwrap()
        .value
        .re;
    assert!((w - gamma_fn(0.5 * s).unwrap()).abs() < 1e-10);
}
