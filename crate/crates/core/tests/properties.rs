//! Property tests for the invariants the numerics rely on.

use num_complex::Complex64;
use proptest::prelude::*;

use schrolab::numerics::{dft_forward, dft_inverse, fit_power_law, GridSpec, SampledField};
use schrolab::propagator::{evolve_grid, kernel_k};
use schrolab::report::Comparison;
use schrolab::spaces::{full_domain, index_high, index_low, lp_norm, p_n_min, weak_lp_quasinorm};
use schrolab::special::{sphere_ft, sphere_ft_split};

fn field_from(values: Vec<(f64, f64)>, count: usize) -> SampledField {
    let grid = GridSpec::cube(1, -4.0, 4.0, count).unwrap();
    SampledField::new(grid, values.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
}

fn values(count: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), count)
}

/// Sum of wide Gaussian wave packets; the spectrum stays far below the
/// top octave of a 128-point grid on [−16, 16].
fn packets(params: Vec<(f64, f64, f64)>) -> SampledField {
    let grid = GridSpec::cube(1, -16.0, 16.0, 128).unwrap();
    SampledField::from_fn(grid, |x| {
        params
            .iter()
            .map(|&(c, k, a)| Complex64::from_polar(a * (-(x[0] - c).powi(2) / 8.0).exp(), k * x[0]))
            .sum()
    })
    .unwrap()
}

fn packet_params() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-4.0..4.0f64, -2.0..2.0f64, 0.1..1.0f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dft_round_trip(v in values(64)) {
        let f = field_from(v, 64);
        let back = dft_inverse(&dft_forward(&f).unwrap()).unwrap();
        for (a, b) in f.values.iter().zip(&back.values) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn weak_never_exceeds_strong(v in values(48), p in 1.0..8.0f64) {
        let f = field_from(v, 48);
        let d = full_domain(&f.grid);
        let weak = weak_lp_quasinorm(&f, p, &d).unwrap();
        let strong = lp_norm(&f, p, &d).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12), "{weak} > {strong}");
    }

    #[test]
    fn free_evolution_conserves_discrete_l2(v in packet_params(), t in 0.0..2.0f64) {
        let f = packets(v);
        let g = evolve_grid(&f, t).unwrap();
        let (a, b) = (f.l2_norm_discrete(), g.l2_norm_discrete());
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn evolution_is_a_group(v in packet_params(), t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
        let f = packets(v);
        let two = evolve_grid(&evolve_grid(&f, t1).unwrap(), t2).unwrap();
        let one = evolve_grid(&f, t1 + t2).unwrap();
        for (a, b) in one.values.iter().zip(&two.values) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn power_law_fit_recovers_exponent(slope in -3.0..3.0f64, c in 0.1..10.0f64) {
        let pts: Vec<(f64, f64)> = (2..9).map(|j| {
            let x = 2f64.powi(j);
            (x, c * x.powf(slope))
        }).collect();
        let fit = fit_power_law(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.predict(3.0) / (c * 3f64.powf(slope)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn comparison_semantics(m in -5.0..5.0f64, p in -5.0..5.0f64, tol in 0.0..2.0f64) {
        prop_assert_eq!(Comparison::Within.holds(m, p, tol), (m - p).abs() <= tol);
        prop_assert_eq!(Comparison::AtMost.holds(m, p, tol), m <= p + tol);
        prop_assert_eq!(Comparison::AtLeast.holds(m, p, tol), m >= p - tol);
        prop_assert!(!Comparison::Within.holds(f64::NAN, p, tol));
    }

    #[test]
    fn sphere_split_reassembles(n in 2usize..=3, rho in 1.0..200.0f64) {
        let split = sphere_ft_split(n, rho).unwrap();
        let full = sphere_ft(n, rho).unwrap();
        prop_assert!((split.leading + split.remainder - full).abs() <= 1e-12 * full.abs().max(1.0));
    }

    #[test]
    fn index_high_is_monotone_and_bounded(n in 1usize..=5, a in 2.0..50.0f64, b in 2.0..50.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (x, y) = (index_high(n, lo).unwrap(), index_high(n, hi).unwrap());
        prop_assert!(x <= y + 1e-12);
        prop_assert!(y <= n as f64);
        prop_assert!(index_low(n, 2.0).unwrap() <= x + 1e-12);
    }

    #[test]
    fn index_high_is_continuous(n in 1usize..=5, p in 2.0..40.0f64) {
        let h = 1e-9;
        let jump = (index_high(n, p + h).unwrap() - index_high(n, p).unwrap()).abs();
        prop_assert!(jump < 1e-6, "jump {jump} at p = {p}, edge {}", 2.0 + p_n_min(n).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kernel_is_even(s in 0.3..2.0f64, t in 0.05..0.9f64, z in 0.1..4.0f64) {
        let a = kernel_k(s, t, &[z], 1).unwrap();
        let b = kernel_k(s, t, &[-z], 1).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm());
    }

    #[test]
    fn kernel_is_rotation_invariant(s in 0.5..2.0f64, t in 0.05..0.9f64, r in 0.2..3.0f64, angle in 0.0..6.28f64) {
        let a = kernel_k(s, t, &[r, 0.0], 2).unwrap();
        let b = kernel_k(s, t, &[r * angle.cos(), r * angle.sin()], 2).unwrap();
        prop_assert!((a - b).norm() <= 1e-8 * a.norm());
    }
}
