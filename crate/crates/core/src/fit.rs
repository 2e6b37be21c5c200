//! Least-squares helpers for convergence-rate and envelope fits.

use num_complex::Complex64;

/// Slope and intercept of the least-squares line through `(x, y)`.
///
/// Returns `None` with fewer than two points or a degenerate abscissa.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Slope of `log |values|` against `log abscissa`; non-positive or
/// non-finite samples are skipped.
pub fn log_log_slope(abscissa: &[f64], values: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = abscissa
        .iter()
        .zip(values)
        .filter(|(a, v)| **a > 0.0 && v.abs() > 0.0 && v.is_finite())
        .map(|(a, v)| (a.ln(), v.abs().ln()))
        .unzip();
    linear_fit(&lx, &ly).map(|(s, _)| s)
}

/// Observed order of convergence between consecutive entries of a
/// refinement ladder: `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`.
pub fn observed_orders(h: &[f64], errors: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(errors.windows(2))
        .map(|(hw, ew)| (ew[0].abs() / ew[1].abs()).ln() / (hw[0] / hw[1]).ln())
        .collect()
}

/// Complex least squares for `target ≈ c1 * basis1 + c2 * basis2`.
///
/// Solves the 2×2 Hermitian normal equations; returns `None` when they
/// are singular.
pub fn complex_two_term_fit(
    basis1: &[Complex64],
    basis2: &[Complex64],
    target: &[Complex64],
) -> Option<(Complex64, Complex64)> {
    let mut a11 = 0.0;
    let mut a22 = 0.0;
    let mut a12 = Complex64::new(0.0, 0.0);
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for ((u, v), t) in basis1.iter().zip(basis2).zip(target) {
        a11 += u.norm_sqr();
        a22 += v.norm_sqr();
        a12 += u.conj() * v;
        b1 += u.conj() * t;
        b2 += v.conj() * t;
    }
    let det = a11 * a22 - a12.norm_sqr();
    if det.abs() <= 1e-14 * (a11 * a22).max(f64::MIN_POSITIVE) {
        return None;
    }
    let c1 = (b1 * a22 - a12 * b2) / det;
    let c2 = (b2 * a11 - a12.conj() * b1) / det;
    Some((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law_exponent() {
        let x: Vec<f64> = (0..6).map(|i| 2f64.powi(i)).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn observed_order_of_quadratic_ladder() {
        let h = [0.04, 0.02, 0.01];
        let e: Vec<f64> = h.iter().map(|h| 7.0 * h * h).collect();
        for o in observed_orders(&h, &e) {
            assert!((o - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_term_fit_is_exact_on_consistent_data() {
        let s: Vec<f64> = (0..7).map(|i| 1.0 + i as f64 * 0.7).collect();
        let b1: Vec<Complex64> = s.iter().map(|s| Complex64::new(0.0, -2.0 * s).exp()).collect();
        let b2: Vec<Complex64> = s.iter().map(|s| Complex64::new(0.0, 2.0 * s).exp() / s).collect();
        let c1 = Complex64::new(0.3, -1.2);
        let c2 = Complex64::new(-0.5, 0.25);
        let t: Vec<Complex64> = b1.iter().zip(&b2).map(|(u, v)| c1 * u + c2 * v).collect();
        let (f1, f2) = complex_two_term_fit(&b1, &b2, &t).unwrap();
        assert!((f1 - c1).norm() < 1e-12 && (f2 - c2).norm() < 1e-12);
    }
}
