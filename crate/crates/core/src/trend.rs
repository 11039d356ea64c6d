//! Least-squares trend fits over truncation families.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares; a single sample fits a flat line.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len(), "mismatched fit inputs");
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return LineFit { slope: 0.0, intercept: ys.first().copied().unwrap_or(0.0) };
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    LineFit { slope, intercept: my - slope * mx }
}

/// Slope of log(y) against log(x); the order-of-growth exponent.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    fit_line(&lx, &ly).slope
}

pub fn strictly_increasing(ys: &[f64]) -> bool {
    ys.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let fit = fit_line(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_growth_exponent() {
        let xs = [4.0, 5.0, 6.0, 7.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|&x| 2.0 * x * x * x).collect();
        assert!((log_log_slope(&xs, &ys) - 3.0).abs() < 1e-9);
    }
}
