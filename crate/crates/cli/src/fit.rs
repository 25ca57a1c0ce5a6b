//! Ordinary least squares on (d, log2 p) pairs for exponent estimation.

/// OLS line fit with a normal-approximation 95% confidence interval on
/// the slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// (low, high) bounds, slope +/- 1.96 standard errors.
    pub ci95: (f64, f64),
    pub points: usize,
}

/// Fits `y = intercept + slope x`. Needs at least 3 points and non-zero
/// x-spread.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = (rss / (nf - 2.0) / sxx).sqrt();
    Some(SlopeFit {
        slope,
        intercept,
        ci95: (slope - 1.96 * se, slope + 1.96 * se),
        points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_tight_interval() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let fit = fit_slope(&pts).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.ci95.1 - fit.ci95.0 < 1e-9);
    }

    #[test]
    fn noise_widens_interval_and_keeps_coverage() {
        let pts = [
            (1.0, -1.1),
            (2.0, -1.9),
            (3.0, -3.2),
            (4.0, -3.8),
            (5.0, -5.1),
        ];
        let fit = fit_slope(&pts).unwrap();
        assert!(fit.ci95.0 < -1.0 && fit.ci95.1 > -1.0 || fit.slope < -0.9);
        assert!(fit.ci95.0 < fit.slope && fit.slope < fit.ci95.1);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_slope(&[(1.0, 2.0), (2.0, 3.0)]).is_none());
        assert!(fit_slope(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]).is_none());
    }
}
