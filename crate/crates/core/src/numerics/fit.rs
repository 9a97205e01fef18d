use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Least-squares line through (log₂ x, log₂ y). The intercept is in log₂ units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub points_used: usize,
}

impl PowerLawFit {
    /// Value of the fitted law at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.log2()).exp2()
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(LabError::DegenerateSweep(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points
        .iter()
        .find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(LabError::InvalidInput(format!(
            "power-law fit needs finite positive coordinates, got ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log2(), y.log2())).collect();
    let (slope, intercept) = least_squares(&logs)?;
    let max_abs_residual = logs
        .iter()
        .map(|&(u, v)| (v - (intercept + slope * u)).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit {
        slope,
        intercept,
        max_abs_residual,
        points_used: points.len(),
    })
}

/// Ordinary least squares `v ≈ intercept + slope·u`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let m = points.len() as f64;
    let mu = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mv = points.iter().map(|p| p.1).sum::<f64>() / m;
    let suu: f64 = points.iter().map(|p| (p.0 - mu).powi(2)).sum();
    let suv: f64 = points.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
    if !(suu > 1e-300) {
        return Err(LabError::DegenerateSweep("all abscissae are equal".into()));
    }
    let slope = suv / suu;
    Ok((slope, mv - slope * mu))
}
