//! Discrete approximations of ℱf(ξ) = ∫ e^{-ix·ξ} f(x) dx and
//! ℱ⁻¹F(x) = (2π)^{-n} ∫ e^{ix·ξ} F(ξ) dξ on uniform grids.
//!
//! On an axis with nodes x_j = a + jh (N points) the dual nodes are
//! ξ_k = c + k·dξ with h·dξ = 2π/N, so each axis reduces to one FFT plus
//! two phase ramps that account for the offsets a and c.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{GridSpec, SampledField, MEMORY_CAP};
use crate::error::{LabError, Result};

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    Forward,
    Inverse,
}

/// Start of the centered dual axis for `count` nodes with dual spacing `step`.
fn centered_start(count: usize, step: f64) -> f64 {
    -((count / 2) as f64) * step
}

fn dual_grid(grid: &GridSpec, origin: Option<&[f64]>) -> Result<(GridSpec, Vec<f64>)> {
    let n = grid.dimension();
    let mut extents = Vec::with_capacity(n);
    let mut starts = Vec::with_capacity(n);
    for axis in 0..n {
        let count = grid.counts[axis];
        let step = 2.0 * PI / (count as f64 * grid.spacing(axis));
        let start = origin.map_or_else(|| centered_start(count, step), |o| o[axis]);
        extents.push((start, start + (count - 1) as f64 * step));
        starts.push(start);
    }
    Ok((GridSpec::new(extents, grid.counts.clone())?, starts))
}

fn transform(field: &SampledField, direction: Direction) -> Result<SampledField> {
    let grid = &field.grid;
    if grid.len() > MEMORY_CAP {
        return Err(LabError::GridTooLarge {
            requested: grid.len(),
            cap: MEMORY_CAP,
        });
    }
    let n = grid.dimension();
    let (dual, dual_starts) = dual_grid(grid, field.conjugate_origin.as_deref())?;
    let mut data = field.values.clone();
    let mut planner = FftPlanner::<f64>::new();
    let sign = if direction == Direction::Forward { -1.0 } else { 1.0 };

    for axis in 0..n {
        let count = grid.counts[axis];
        let a = grid.extents[axis].0;
        let h = grid.spacing(axis);
        let c = dual_starts[axis];
        let dxi = dual.spacing(axis);
        let fft = match direction {
            Direction::Forward => planner.plan_fft_forward(count),
            Direction::Inverse => planner.plan_fft_inverse(count),
        };
        // Pre-ramp e^{∓ i j h c}, post factor scale·e^{∓ i a ξ_k}.
        let pre: Vec<Complex64> = (0..count)
            .map(|j| Complex64::from_polar(1.0, sign * j as f64 * h * c))
            .collect();
        let scale = match direction {
            Direction::Forward => h,
            Direction::Inverse => h / (2.0 * PI),
        };
        let post: Vec<Complex64> = (0..count)
            .map(|k| Complex64::from_polar(scale, sign * a * (c + k as f64 * dxi)))
            .collect();

        let stride: usize = grid.counts[axis + 1..].iter().product();
        let outer: usize = grid.counts[..axis].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); count];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * count * stride + s;
                for j in 0..count {
                    line[j] = data[base + j * stride] * pre[j];
                }
                fft.process(&mut line);
                for k in 0..count {
                    data[base + k * stride] = line[k] * post[k];
                }
            }
        }
    }
    let origin: Vec<f64> = grid.extents.iter().map(|e| e.0).collect();
    Ok(SampledField {
        grid: dual,
        values: data,
        conjugate_origin: Some(origin),
    })
}

/// Forward transform of a spatial field onto its dual frequency grid.
pub fn dft_forward(field: &SampledField) -> Result<SampledField> {
    transform(field, Direction::Forward)
}

/// Inverse transform of a frequency field, including the (2π)^{-n} factor.
pub fn dft_inverse(field: &SampledField) -> Result<SampledField> {
    transform(field, Direction::Inverse)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_field(count: usize, half: f64) -> SampledField {
        let grid = GridSpec::new(vec![(-half, half)], vec![count]).unwrap();
        SampledField::from_fn(grid, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0)).unwrap()
    }

    #[test]
    fn round_trip_restores_samples() {
        let f = gaussian_field(256, 12.0);
        let back = dft_inverse(&dft_forward(&f).unwrap()).unwrap();
        assert_eq!(back.grid.counts, f.grid.counts);
        for (u, v) in back.grid.axis_points(0).iter().zip(f.grid.axis_points(0)) {
            assert!((u - v).abs() < 1e-12);
        }
        let scale = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (u, v) in back.values.iter().zip(&f.values) {
            assert!((u - v).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn gaussian_pair() {
        let f = gaussian_field(512, 20.0);
        let ff = dft_forward(&f).unwrap();
        for (k, v) in ff.values.iter().enumerate() {
            let xi = ff.grid.coordinate(0, k);
            let exact = (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp();
            assert!((v - exact).norm() < 1e-8, "xi={xi}: {v} vs {exact}");
        }
    }

    #[test]
    fn off_center_grid_gets_phase_right() {
        // Shifted Gaussian e^{-(x-1)^2/2} has transform √(2π) e^{-iξ} e^{-ξ²/2}.
        let grid = GridSpec::new(vec![(-15.0, 17.0)], vec![400]).unwrap();
        let f = SampledField::from_fn(grid, |x| {
            Complex64::new((-0.5 * (x[0] - 1.0).powi(2)).exp(), 0.0)
        })
        .unwrap();
        let ff = dft_forward(&f).unwrap();
        for (k, v) in ff.values.iter().enumerate() {
            let xi = ff.grid.coordinate(0, k);
            let exact = Complex64::from_polar((2.0 * PI).sqrt() * (-0.5 * xi * xi).exp(), -xi);
            assert!((v - exact).norm() < 1e-8);
        }
    }

    #[test]
    fn concentrated_bump_has_flat_spectrum() {
        let grid = GridSpec::new(vec![(-10.0, 10.0)], vec![1024]).unwrap();
        let f = SampledField::from_fn(grid, |x| {
            Complex64::new((-x[0] * x[0] / (2.0 * 0.001)).exp(), 0.0)
        })
        .unwrap();
        let ff = dft_forward(&f).unwrap();
        let centre = ff.values[512].norm();
        let mid = ff
            .values
            .iter()
            .enumerate()
            .filter(|(k, _)| ff.grid.coordinate(0, *k).abs() < 10.0)
            .map(|(_, v)| v.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(mid > 0.85 * centre);
    }

    #[test]
    fn two_dimensional_gaussian_pair() {
        let grid = GridSpec::cube(2, -12.0, 12.0, 96).unwrap();
        let f = SampledField::from_fn(grid, |x| {
            Complex64::new((-0.5 * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        })
        .unwrap();
        let ff = dft_forward(&f).unwrap();
        for i in (0..ff.values.len()).step_by(37) {
            let p = ff.grid.point(i);
            let exact = 2.0 * PI * (-0.5 * (p[0] * p[0] + p[1] * p[1])).exp();
            assert!((ff.values[i] - exact).norm() < 1e-8);
        }
        let back = dft_inverse(&ff).unwrap();
        for (u, v) in back.values.iter().zip(&f.values) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let err = GridSpec::with_cap(vec![(0.0, 1.0)], vec![100], 50).unwrap_err();
        assert!(matches!(err, LabError::GridTooLarge { .. }));
    }
}
