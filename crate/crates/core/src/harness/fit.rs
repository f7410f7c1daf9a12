//! Log-log least squares.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual in log space over the fitted points.
    pub residual: f64,
    pub used: usize,
}

/// OLS on `(ln x, ln y)`; the two smallest points are dropped once there are five or more.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: points.len() });
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // nan must fail too
    for &(x, y) in points {
        if !(x > 0.0) {
            return Err(Error::NonPositiveValue(x));
        }
        if !(y > 0.0) {
            return Err(Error::NonPositiveValue(y));
        }
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidSpec("fit abscissae must be strictly increasing".into()));
    }
    let pts = if points.len() >= 5 { &points[2..] } else { points };
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (slope, intercept) = ols(&logs);
    let residual =
        (logs.iter().map(|&(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / logs.len() as f64).sqrt();
    Ok(Fit { slope, intercept, residual, used: logs.len() })
}

/// Plain least squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0].iter().map(|&x| (x, x * x)).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn perimeter_scaling() {
        let pts: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0, 32.0].iter().map(|&s| (4.0 * s, 2.0 * s * s)).collect();
        assert!((fit_exponent(&pts).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn drops_small_sizes() {
        let pts = [(1.0, 100.0), (2.0, 1.0), (3.0, 9.0), (4.0, 16.0), (5.0, 25.0)];
        let f = fit_exponent(&pts).unwrap();
        assert_eq!(f.used, 3);
        assert!((f.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]), Err(Error::InsufficientPoints { .. })));
        assert!(matches!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(Error::NonPositiveValue(_))));
    }
}
