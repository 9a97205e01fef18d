use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Default cap on the number of complex samples held by one grid.
pub const MEMORY_CAP: usize = 1 << 26;

/// Uniform rectangular grid in dimension 1, 2 or 3. Axis 0 is the slowest
/// varying index in row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extents: Vec<(f64, f64)>,
    pub counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(extents: Vec<(f64, f64)>, counts: Vec<usize>) -> Result<Self> {
        Self::with_cap(extents, counts, MEMORY_CAP)
    }

    pub fn with_cap(extents: Vec<(f64, f64)>, counts: Vec<usize>, cap: usize) -> Result<Self> {
        let n = extents.len();
        if !(1..=3).contains(&n) {
            return Err(LabError::UnsupportedDimension(n));
        }
        if counts.len() != n {
            return Err(LabError::InvalidInput(format!(
                "{} extents but {} counts",
                n,
                counts.len()
            )));
        }
        for (&(a, b), &c) in extents.iter().zip(&counts) {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(LabError::InvalidInput(format!("bad axis extent [{a}, {b}]")));
            }
            if c < 2 {
                return Err(LabError::InvalidInput(format!("axis needs >= 2 points, got {c}")));
            }
        }
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .unwrap_or(usize::MAX);
        if total > cap {
            return Err(LabError::GridTooLarge {
                requested: total,
                cap,
            });
        }
        Ok(Self { extents, counts })
    }

    /// Same extent `[lo, hi]` and count on every axis.
    pub fn cube(dimension: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(vec![(lo, hi); dimension], vec![count; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.extents.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (a, b) = self.extents[axis];
        (b - a) / (self.counts[axis] - 1) as f64
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.extents[axis].0 + i as f64 * self.spacing(axis)
    }

    pub fn axis_points(&self, axis: usize) -> Vec<f64> {
        (0..self.counts[axis]).map(|i| self.coordinate(axis, i)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dimension()).map(|k| self.spacing(k)).product()
    }

    /// Multi-index of a flat row-major offset.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dimension()).rev() {
            idx[axis] = flat % self.counts[axis];
            flat /= self.counts[axis];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dimension() {
            x[axis] = self.coordinate(axis, idx[axis]);
        }
        x
    }
}

/// Complex samples on a [`GridSpec`]. `conjugate_origin` remembers where the
/// grid this field was transformed from started, so that a round trip lands
/// back on the original nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub conjugate_origin: Option<Vec<f64>>,
}

impl SampledField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::InvalidInput(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LabError::InvalidInput("field values must be finite".into()));
        }
        Ok(Self {
            grid,
            values,
            conjugate_origin: None,
        })
    }

    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: GridSpec, f: F) -> Result<Self> {
        let n = grid.dimension();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                f(&x[..n])
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn l2_norm_discrete(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }
}
