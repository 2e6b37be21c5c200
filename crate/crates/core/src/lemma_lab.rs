//! Sampled checks of the regularity and decay estimates for `V = f̌`:
//! Hölder continuity, blow-up at the origin, super-polynomial tails and
//! the combined envelope.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{config, Error, Result};
use crate::fit::linear_fit;
use crate::quad::Estimate;
use crate::report::Table;
use crate::scattering::{tail_magnitudes, vanishes};
use crate::transforms::{inverse_fourier_derivative, inverse_fourier_direct, ProfileFunction, TransformOptions};

/// Slack allowed on every fitted growth exponent.
pub const SLOPE_SLACK: f64 = 0.05;
const HYPOTHESIS_BASE: [f64; 8] = [1.0, -1.0, 10.0, -10.0, 100.0, -100.0, 1000.0, -1000.0];
const HYPOTHESIS_EXTENDED: [f64; 4] = [1e4, -1e4, 1e5, -1e5];
const HYPOTHESIS_GROWTH: f64 = 10.0;

/// Result of one envelope fit.
///
/// Slopes are growth exponents toward the end of the grid where the
/// estimate is tested: against `1/r` for small-r and Hölder fits (in the
/// increment `1/δ`), against `r` for tail fits. `pass` holds when the fitted
/// growth does not exceed the claimed one by more than [`SLOPE_SLACK`] and
/// the constant is finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub check: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Grid range used for the slope fit.
    pub window: (f64, f64),
    pub fitted_constant: f64,
    pub fitted_slope: f64,
    pub claimed_slope: f64,
    pub pass: bool,
}

impl EnvelopeFit {
    fn new(check: String, grid: Vec<f64>, values: Vec<f64>, window: (f64, f64), fitted_constant: f64, fitted_slope: f64, claimed_slope: f64) -> Self {
        let pass = fitted_constant.is_finite() && fitted_slope.is_finite() && fitted_slope <= claimed_slope + SLOPE_SLACK;
        Self {
            check,
            grid,
            values,
            window,
            fitted_constant,
            fitted_slope,
            claimed_slope,
            pass,
        }
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["r", "value"]);
        for (r, v) in self.grid.iter().zip(&self.values) {
            t.push(vec![*r, *v]);
        }
        t.with_footer("fitted_slope", self.fitted_slope)
            .with_footer("claimed_slope", self.claimed_slope)
            .with_footer("fitted_constant", self.fitted_constant)
    }
}

/// `n` log-spaced points from `a` to `b`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n.max(2) - 1) as f64))
        .collect()
}

/// Sampled `|∂^j f(p)| ≤ C (1+|p|)^{-j-decay}` for `j ≤ order`, plus vanishing at infinity.
fn check_hypothesis(f: &ProfileFunction, order: usize, decay: f64) -> Result<()> {
    let order = order.min(f.max_order());
    let envelope = |p: f64| -> Vec<f64> {
        let d = f.derivatives(p, order);
        (0..=order).map(|j| (1.0 + p.abs()).powf(j as f64 + decay) * d[j].norm()).collect()
    };
    let base: Vec<Vec<f64>> = HYPOTHESIS_BASE.iter().map(|&p| envelope(p)).collect();
    let ext: Vec<Vec<f64>> = HYPOTHESIS_EXTENDED.iter().map(|&p| envelope(p)).collect();
    for j in 0..=order {
        let b = base.iter().map(|v| v[j]).fold(0.0, f64::max);
        let e = ext.iter().map(|v| v[j]).fold(0.0, f64::max);
        if !b.is_finite() || !e.is_finite() || e > HYPOTHESIS_GROWTH * b {
            return Err(Error::RejectedInput(format!(
                "'{}': (1+|p|)^({j}+{decay}) |f^({j})| grows from {b:e} to {e:e} between |p| ≤ 1e3 and |p| ≤ 1e5",
                f.description()
            )));
        }
    }
    let (mid, far) = tail_magnitudes(f);
    if !vanishes(mid, far) {
        return Err(Error::RejectedInput(format!(
            "'{}' does not vanish at infinity: |f(±1e4)| = {mid:e}, |f(±1e6)| = {far:e}",
            f.description()
        )));
    }
    Ok(())
}

fn growth_fit(x: &[f64], y: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(x, v)| (x.ln(), v.ln()))
        .unzip();
    if lx.len() < 2 {
        return f64::NAN;
    }
    linear_fit(&lx, &ly).map(|(s, _)| s).unwrap_or(f64::NAN)
}

fn derivative_of_transform(f: &ProfileFunction, r: f64, k: usize, opts: &TransformOptions) -> Result<Estimate> {
    inverse_fourier_derivative(f, r, k, opts)
}

/// Hölder quotients `|V(a) - V(b)| / |a - b|^ε` of `V = f̌` (computed by direct
/// quadrature) over pairs with `|a - b| ≤ 1`.
///
/// The hypothesis `|f(p)| ≤ C(1+|p|)^{-1-ε}` is sampled first; `0 < ε < 1`.
pub fn check_holder(f: &ProfileFunction, pairs: &[(f64, f64)]) -> Result<EnvelopeFit> {
    let eps = f.epsilon();
    if !(eps > 0.0 && eps < 1.0) {
        return config(format!("Hölder exponent must lie in (0, 1), got {eps}"));
    }
    check_hypothesis(f, 0, 1.0 + eps)?;
    let pairs: Vec<(f64, f64)> = pairs.iter().copied().filter(|(a, b)| a != b && (a - b).abs() <= 1.0).collect();
    if pairs.len() < 2 {
        return config("Hölder check needs at least two pairs with 0 < |a - b| ≤ 1");
    }
    let opts = TransformOptions::default();
    let quotients: Vec<Result<(f64, f64)>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let va = inverse_fourier_direct(f, a, &opts)?.value;
            let vb = inverse_fourier_direct(f, b, &opts)?.value;
            let delta = (a - b).abs();
            Ok((delta, (va - vb).norm() / delta.powf(eps)))
        })
        .collect();
    let mut grid = Vec::with_capacity(pairs.len());
    let mut values = Vec::with_capacity(pairs.len());
    for q in quotients {
        let (delta, v) = q?;
        grid.push(delta);
        values.push(v);
    }
    let inv: Vec<f64> = grid.iter().map(|d| 1.0 / d).collect();
    let slope = growth_fit(&inv, &values);
    let constant = values.iter().copied().fold(0.0, f64::max);
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(0.0, f64::max);
    Ok(EnvelopeFit::new(format!("holder eps={eps}"), grid, values, (lo, hi), constant, slope, 0.0))
}

/// Pairs `(c - δ/3, c + 2δ/3)` around each centre for a log ladder of δ in `[1e-4, 1]`.
pub fn holder_pairs(centres: &[f64], count: usize) -> Vec<(f64, f64)> {
    let deltas = log_grid(1e-4, 1.0, count);
    centres
        .iter()
        .flat_map(|&c| deltas.iter().map(move |&d| (c - d / 3.0, c + 2.0 * d / 3.0)))
        .collect()
}

/// Blow-up of `∂^{k-1} V` at the origin: claimed `|∂^{k-1} V(r)| ≤ C r^{-(k-ε)}`.
///
/// The slope is fitted over the first two decades of the grid, where the
/// singular term dominates.
pub fn check_small_r_blowup(f: &ProfileFunction, k: usize, r_grid: &[f64]) -> Result<EnvelopeFit> {
    if k == 0 {
        return config("small-r check needs k ≥ 1");
    }
    if r_grid.len() < 3 || r_grid.iter().any(|r| !(*r > 0.0)) {
        return config("small-r grid needs at least three positive points");
    }
    let eps = f.epsilon();
    check_hypothesis(f, k, eps)?;
    let opts = TransformOptions::default();
    let values: Vec<f64> = r_grid
        .par_iter()
        .map(|&r| derivative_of_transform(f, r, k - 1, &opts).map(|e| e.value.norm()))
        .collect::<Result<_>>()?;
    let r_min = r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let window: Vec<usize> = (0..r_grid.len()).filter(|&i| r_grid[i] <= 100.0 * r_min).collect();
    let inv: Vec<f64> = window.iter().map(|&i| 1.0 / r_grid[i]).collect();
    let vals: Vec<f64> = window.iter().map(|&i| values[i]).collect();
    let slope = growth_fit(&inv, &vals);
    let claimed = k as f64 - eps;
    let constant = r_grid
        .iter()
        .zip(&values)
        .map(|(r, v)| v * r.powf(claimed))
        .fold(0.0, f64::max);
    let hi = window.iter().map(|&i| r_grid[i]).fold(0.0, f64::max);
    Ok(EnvelopeFit::new(format!("small_r k={k}"), r_grid.to_vec(), values, (r_min, hi), constant, slope, claimed))
}

/// Samples of `|∂^k V|` with the points whose value exceeds ten times the
/// quadrature error estimate.
fn resolved_samples(f: &ProfileFunction, k: usize, r_grid: &[f64]) -> Result<(Vec<f64>, Vec<bool>)> {
    let opts = TransformOptions::default();
    let est: Vec<Estimate> = r_grid
        .par_iter()
        .map(|&r| derivative_of_transform(f, r, k, &opts))
        .collect::<Result<_>>()?;
    let values = est.iter().map(|e| e.value.norm()).collect();
    let resolved = est.iter().map(|e| e.value.norm() > 10.0 * e.error.max(opts.abs_tol)).collect();
    Ok((values, resolved))
}

fn tail_growth(grid: &[f64], env: &[f64], resolved: &[bool]) -> (f64, (f64, f64)) {
    let last = (0..grid.len()).rev().find(|&i| resolved[i]);
    let Some(last) = last else {
        return (f64::NEG_INFINITY, (0.0, 0.0));
    };
    let top = grid[last];
    let idx: Vec<usize> = (0..=last).filter(|&i| resolved[i] && grid[i] >= top / 10.0).collect();
    let x: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| env[i]).collect();
    let lo = x.first().copied().unwrap_or(top);
    if x.len() < 3 {
        // Resolved signal ends before a decade of tail is visible.
        return (f64::NEG_INFINITY, (lo, top));
    }
    (growth_fit(&x, &y), (lo, top))
}

/// Tail decay `|∂^k V(r)| r^ℓ ≤ C` on `r_grid ⊂ [1, ∞)`.
///
/// Only points where `V` is resolved above the quadrature error enter the
/// fit (the transform of a smooth profile drops below roundoff well before
/// r = 100); the slope is taken over the last resolved decade.
pub fn check_tail_decay(f: &ProfileFunction, k: usize, ell: u32, r_grid: &[f64]) -> Result<EnvelopeFit> {
    if r_grid.len() < 3 || r_grid.iter().any(|r| !(*r >= 1.0)) {
        return config("tail grid needs at least three points with r ≥ 1");
    }
    check_hypothesis(f, k + 1, f.epsilon())?;
    let (values, resolved) = resolved_samples(f, k, r_grid)?;
    let env: Vec<f64> = r_grid.iter().zip(&values).map(|(r, v)| v * r.powi(ell as i32)).collect();
    let constant = env.iter().zip(&resolved).filter(|(_, ok)| **ok).map(|(e, _)| *e).fold(0.0, f64::max);
    let (slope, window) = tail_growth(r_grid, &env, &resolved);
    Ok(EnvelopeFit::new(format!("tail k={k} ell={ell}"), r_grid.to_vec(), values, window, constant, slope, 0.0))
}

/// Combined envelope `|∂^k V(r)| ≤ C r^{-k-1+ε} (1+r)^{-ℓ}` on a log grid over
/// `[1e-4, 100]`: both the small-r and the tail growth must stay within slack.
pub fn check_combined(f: &ProfileFunction, k: usize, ell: u32) -> Result<EnvelopeFit> {
    let eps = f.epsilon();
    check_hypothesis(f, k + 1, eps)?;
    let grid = log_grid(1e-4, 100.0, 49);
    let (values, resolved) = resolved_samples(f, k, &grid)?;
    let env: Vec<f64> = grid
        .iter()
        .zip(&values)
        .map(|(r, v)| v * r.powf(k as f64 + 1.0 - eps) * (1.0 + r).powi(ell as i32))
        .collect();
    let small: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] <= 1e-2).collect();
    let inv: Vec<f64> = small.iter().map(|&i| 1.0 / grid[i]).collect();
    let vals: Vec<f64> = small.iter().map(|&i| env[i]).collect();
    let small_growth = growth_fit(&inv, &vals);
    let (tail, _) = tail_growth(&grid, &env, &resolved);
    let constant = env.iter().zip(&resolved).filter(|(_, ok)| **ok).map(|(e, _)| *e).fold(0.0, f64::max);
    Ok(EnvelopeFit::new(
        format!("combined k={k} ell={ell}"),
        grid,
        values,
        (1e-4, 100.0),
        constant,
        small_growth.max(tail),
        0.0,
    ))
}

/// Outcome of a designated negative control.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlOutcome {
    pub name: String,
    pub check: String,
    /// The check rejected the input or its fit failed.
    pub flagged: bool,
    pub detail: String,
}

fn outcome(name: &str, check: &str, res: Result<EnvelopeFit>) -> ControlOutcome {
    match res {
        Ok(fit) => ControlOutcome {
            name: name.into(),
            check: check.into(),
            flagged: !fit.pass,
            detail: format!("fitted slope {} vs claimed {}", fit.fitted_slope, fit.claimed_slope),
        },
        Err(e) => ControlOutcome {
            name: name.into(),
            check: check.into(),
            flagged: matches!(e, Error::RejectedInput(_)),
            detail: e.to_string(),
        },
    }
}

/// Runs every designated counterexample through the check it must fail.
pub fn negative_controls() -> Vec<ControlOutcome> {
    let constant = ProfileFunction::constant(1.0);
    let small_grid = log_grid(1e-4, 1.0, 25);
    let tail_grid = log_grid(1.0, 100.0, 25);
    vec![
        outcome("constant", "holder", check_holder(&constant, &holder_pairs(&[0.0], 8))),
        outcome("constant", "small_r k=1", check_small_r_blowup(&constant, 1, &small_grid)),
        outcome("constant", "tail k=0 ell=6", check_tail_decay(&constant, 0, 6, &tail_grid)),
        outcome(
            "(1+p^2)^(-1/8) declared eps=1/2",
            "small_r k=1",
            check_small_r_blowup(&ProfileFunction::inverse_power(0.125).with_epsilon(0.5), 1, &small_grid),
        ),
        outcome(
            "sgn(p)/(1+p^2)",
            "tail k=0 ell=2",
            check_tail_decay(&ProfileFunction::signed_lorentzian(), 0, 2, &tail_grid),
        ),
    ]
}
