use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `log gap = intercept + slope * log T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    /// `exp(intercept)`, the constant in `gap ≈ C T^slope`.
    pub constant: f64,
    pub points: usize,
    /// Points dropped because their gap was not strictly positive.
    pub excluded: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if let Some(&(t, _)) = points.iter().find(|(t, _)| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidInput(format!("horizon {t} is not positive")));
    }
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, g)| g.is_finite() && *g > 0.0)
        .map(|&(t, g)| (t.ln(), g.ln()))
        .collect();
    let excluded = points.len() - used.len();
    if used.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: used.len(),
        });
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all horizons coincide".into()));
    }
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = used
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
        constant: intercept.exp(),
        points: used.len(),
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HORIZONS: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

    #[test]
    fn exact_inverse_square_root() {
        let pts: Vec<_> = HORIZONS.iter().map(|&t| (t, 3.0 / t.sqrt())).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.constant - 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!((fit.points, fit.excluded), (7, 0));
    }

    #[test]
    fn exact_inverse() {
        let pts: Vec<_> = HORIZONS.iter().map(|&t| (t, 5.0 / t)).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.constant - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_gaps_are_excluded_and_counted() {
        let mut pts: Vec<_> = HORIZONS.iter().map(|&t| (t, 2.0 / t)).collect();
        pts[6].1 = 0.0;
        pts[5].1 = 0.0;
        let fit = fit_rate(&pts).unwrap();
        assert_eq!((fit.points, fit.excluded), (5, 2));
        assert!((fit.slope + 1.0).abs() < 1e-12);
        pts[4].1 = 0.0;
        pts[3].1 = 0.0;
        assert!(matches!(
            fit_rate(&pts),
            Err(Error::InsufficientPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn single_point_is_insufficient() {
        assert!(matches!(
            fit_rate(&[(1.0, 1.0)]),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn outlier_inflates_residual_not_slope() {
        // Deterministic small perturbations around 4/T, then one outlier.
        let wiggle = [0.02, -0.015, 0.01, -0.02, 0.015, -0.01, 0.005];
        let clean: Vec<_> = HORIZONS
            .iter()
            .zip(wiggle)
            .map(|(&t, w)| (t, 4.0 / t * (1.0 + w)))
            .collect();
        let mut dirty = clean.clone();
        dirty[3].1 *= 1.5;
        let a = fit_rate(&clean).unwrap();
        let b = fit_rate(&dirty).unwrap();
        assert!(b.residual > 5.0 * a.residual);
        assert!((a.slope - b.slope).abs() <= 0.1);
    }
}
