//! For f̂ supported in [−κ, κ]: |∫f| ≤ (κ²/2)∫|f|x². The dilates
//! φ_κ(y) = κψ(κy) keep ∫φ_κ = ψ̂(0) = 1 while the second moment falls like
//! κ^{−2}, so some κ₀ makes 4∫|φ_κ₀|y² < |∫φ_κ₀|.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bumps::BumpLibrary;
use crate::error::{LabError, Result};
use crate::numerics::{GridSpec, SampledField};
use crate::spaces::{inverse_transform_on_grid, SpectralProfile, Support};

/// c·a·ψ(a x)·e^{ibx}, whose transform c·ψ̂((ξ−b)/a) lives on [b−a, b+a].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandTerm {
    pub coef: Complex64,
    pub dilation: f64,
    pub shift: f64,
}

/// Finite sum of modulated dilates of ψ_band with spectrum in [−κ, κ].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimited {
    pub kappa: f64,
    pub terms: Vec<BandTerm>,
}

impl BandLimited {
    pub fn new(kappa: f64, terms: Vec<BandTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(LabError::InvalidInput("need at least one term".into()));
        }
        for t in &terms {
            if !(t.dilation > 0.0) || t.dilation + t.shift.abs() > kappa * (1.0 + 1e-12) {
                return Err(LabError::InvalidInput(format!(
                    "term with dilation {} and shift {} leaves the band [-{kappa}, {kappa}]",
                    t.dilation, t.shift
                )));
            }
        }
        Ok(Self { kappa, terms })
    }

    /// ψ_band dilated to bandwidth κ: f(x) = κψ(κx).
    pub fn dilated_band(kappa: f64) -> Result<Self> {
        Self::new(
            kappa,
            vec![BandTerm {
                coef: Complex64::new(1.0, 0.0),
                dilation: kappa,
                shift: 0.0,
            }],
        )
    }

    pub fn transform(&self, xi: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coef * BumpLibrary::psi_band_hat((xi - t.shift) / t.dilation))
            .sum()
    }

    /// Samples f by one inverse DFT. The grid reaches 600 decay lengths of
    /// the narrowest term and resolves the band with room to spare.
    pub fn sample(&self) -> Result<SampledField> {
        let narrow = self.terms.iter().map(|t| t.dilation).fold(f64::INFINITY, f64::min);
        let half = 600.0 / narrow;
        let step = 2.0 / self.kappa;
        let count = (2.0 * half / step).ceil() as usize + 1;
        let grid = GridSpec::new(vec![(-half, half)], vec![count])?;
        let me = self.clone();
        let profile = SpectralProfile::explicit(1, move |x: &[f64]| me.transform(x[0]), Support::Interval {
            lo: -self.kappa,
            hi: self.kappa,
        })?;
        inverse_transform_on_grid(&profile, &grid)
    }
}

/// Trapezoid ∫F and ∫|F|x^2 over the whole grid.
fn integral_and_moment(field: &SampledField) -> (Complex64, f64) {
    let h = field.grid.spacing(0);
    let last = field.values.len() - 1;
    let mut total = Complex64::new(0.0, 0.0);
    let mut moment = 0.0;
    for (i, v) in field.values.iter().enumerate() {
        let w = if i == 0 || i == last { 0.5 * h } else { h };
        let x = field.grid.coordinate(0, i);
        total += v * w;
        moment += v.norm() * x * x * w;
    }
    (total, moment)
}

/// (|∫f|, (κ²/2)∫|f|x²), both by the trapezoid rule on [`BandLimited::sample`].
pub fn lemma_band_limit_check(f: &BandLimited) -> Result<(f64, f64)> {
    let field = f.sample()?;
    let (total, moment) = integral_and_moment(&field);
    Ok((total.norm(), 0.5 * f.kappa * f.kappa * moment))
}

/// Seeded random element: 1 to 4 terms with dilations in [κ/8, κ/2] and
/// shifts keeping each term inside the band.
pub fn random_band_limited<R: Rng>(rng: &mut R, kappa: f64) -> Result<BandLimited> {
    let count = rng.gen_range(1..=4);
    let terms = (0..count)
        .map(|_| {
            let dilation = kappa * rng.gen_range(0.125..0.5);
            let room = kappa - dilation;
            BandTerm {
                coef: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                dilation,
                shift: rng.gen_range(-room..=room),
            }
        })
        .collect();
    BandLimited::new(kappa, terms)
}

/// One row of the randomized suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub kappa: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// `count` seeded random band-limited functions with κ drawn from [1/2, 8].
pub fn lemma_random_suite(seed: u64, count: usize) -> Result<Vec<BandCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let kappa = rng.gen_range(0.5..8.0);
            let f = random_band_limited(&mut rng, kappa)?;
            let (lhs, rhs) = lemma_band_limit_check(&f)?;
            Ok(BandCheck { kappa, lhs, rhs })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaSearch {
    pub kappa0: f64,
    /// ∫|ψ_band| y².
    pub second_moment: f64,
    /// ∫ψ_band, which is ψ̂_band(0) = 1 up to quadrature error.
    pub integral: f64,
    /// 4∫|φ_κ₀|y² = 4M₂/κ₀².
    pub moment_side: f64,
}

/// Dyadic κ grid on [2, 64] with 16 points per octave.
pub fn default_kappa_grid() -> Vec<f64> {
    (16..=96).map(|j| (j as f64 / 16.0).exp2()).collect()
}

/// Smallest κ on the grid with 4∫|φ_κ|y² < |∫φ_κ| by a 10% margin.
pub fn lemma_kappa_search(kappa_grid: &[f64]) -> Result<KappaSearch> {
    let table = BumpLibrary::psi_band_table(1000.0, 0.5)?;
    let (total, second_moment) = integral_and_moment(&table);
    let integral = total.re;
    let mut grid = kappa_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    for kappa in grid {
        let moment_side = 4.0 * second_moment / (kappa * kappa);
        if 1.1 * moment_side < integral.abs() {
            if !(kappa > 2.0 * std::f64::consts::SQRT_2) {
                return Err(LabError::HypothesisViolation(format!(
                    "kappa0 = {kappa} does not exceed 2*sqrt(2)"
                )));
            }
            return Ok(KappaSearch {
                kappa0: kappa,
                second_moment,
                integral,
                moment_side,
            });
        }
    }
    Err(LabError::NotFound("no kappa on the grid satisfies the moment inequality".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    #[test]
    fn band_function_and_dilate() {
        let (lhs, rhs) = lemma_band_limit_check(&BandLimited::dilated_band(1.0).unwrap()).unwrap();
        assert!((lhs - 1.0).abs() < 1e-9);
        assert!(lhs <= rhs);
        let (lhs4, rhs4) = lemma_band_limit_check(&BandLimited::dilated_band(4.0).unwrap()).unwrap();
        assert!((lhs4 - 1.0).abs() < 1e-9);
        // (κ²/2)·M₂/κ²: the right side does not move under dilation.
        assert!((rhs4 / rhs - 1.0).abs() < 1e-6, "{rhs} vs {rhs4}");
    }

    #[test]
    fn out_of_band_terms_rejected() {
        let t = BandTerm {
            coef: Complex64::new(1.0, 0.0),
            dilation: 1.0,
            shift: 0.5,
        };
        assert!(BandLimited::new(1.2, vec![t]).is_err());
    }

    #[test]
    fn random_combinations_hold() {
        let suite = lemma_random_suite(7, 20).unwrap();
        assert_eq!(suite, lemma_random_suite(7, 20).unwrap());
        for c in suite {
            assert!(c.lhs <= c.rhs, "{c:?}");
        }
    }

    #[test]
    fn kappa_search_result() {
        let k = lemma_kappa_search(&default_kappa_grid()).unwrap();
        assert!((k.integral - 1.0).abs() < 1e-9);
        assert!((k.second_moment - 31.19).abs() < 0.05, "{}", k.second_moment);
        assert!(k.kappa0 > 2.0 * std::f64::consts::SQRT_2);
        assert!(1.1 * k.moment_side < 1.0);
        assert!(lemma_kappa_search(&[2.0, 4.0]).is_err());
    }
}
