//! One-dimensional Fourier transforms in the conventions
//! `f̌(r) = (2π)^{-1} ∫ e^{irp} f(p) dp` and `f(p) = ∫ e^{-irp} f̌(r) dr`,
//! the Hilbert transform as the multiplier `i sgn r` on `f̌`, and a direct
//! principal-value reference implementation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{config, Error, Result};
use crate::geometry::RadialRule;
use crate::quad::{self, Estimate, Tolerance};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Highest derivative order handed out by the analytic presets.
pub const ANALYTIC_ORDER: usize = 24;

type ValueFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type DerivativesFn = Arc<dyn Fn(f64, usize) -> Vec<Complex64> + Send + Sync>;

/// A function of `p ∈ ℝ` with access to its derivatives and a declared
/// decay class `(1 + |p|)^{-k-ε}` for the k-th derivative.
#[derive(Clone)]
pub struct ProfileFunction {
    eval: ValueFn,
    derivatives: Option<DerivativesFn>,
    epsilon: f64,
    max_order: usize,
    description: String,
}

impl std::fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProfileFunction")
            .field("description", &self.description)
            .field("epsilon", &self.epsilon)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl ProfileFunction {
    /// Profile with derivatives by central differences (trusted up to order 3).
    pub fn from_fn<F>(eval: F, epsilon: f64, description: impl Into<String>) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            derivatives: None,
            epsilon,
            max_order: 3,
            description: description.into(),
        }
    }

    /// Profile whose `derivatives(p, K)` closure returns `∂^0 f(p), …, ∂^K f(p)`.
    pub fn with_derivatives<F, D>(
        eval: F,
        derivatives: D,
        epsilon: f64,
        max_order: usize,
        description: impl Into<String>,
    ) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(f64, usize) -> Vec<Complex64> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            derivatives: Some(Arc::new(derivatives)),
            epsilon,
            max_order,
            description: description.into(),
        }
    }

    /// `(1 + p²)^{-β}`; declared ε is `min(2β, 1/2)`.
    pub fn inverse_power(beta: f64) -> Self {
        let eval = move |p: f64| Complex64::new((1.0 + p * p).powf(-beta), 0.0);
        let derivs = move |p: f64, order: usize| {
            inverse_power_derivatives(beta, p, order)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect()
        };
        Self::with_derivatives(
            eval,
            derivs,
            (2.0 * beta).min(0.5),
            ANALYTIC_ORDER,
            format!("(1+p^2)^(-{beta})"),
        )
    }

    /// `(1 + p²)^{-1}`.
    pub fn lorentzian() -> Self {
        let mut f = Self::inverse_power(1.0);
        f.description = "lorentzian".into();
        f
    }

    /// `sgn(p) (1 + p²)^{-1}`: jump at the origin.
    pub fn signed_lorentzian() -> Self {
        let sign = |p: f64| {
            if p > 0.0 {
                1.0
            } else if p < 0.0 {
                -1.0
            } else {
                0.0
            }
        };
        Self::with_derivatives(
            move |p| Complex64::new(sign(p) / (1.0 + p * p), 0.0),
            move |p, order| {
                inverse_power_derivatives(1.0, p, order)
                    .into_iter()
                    .map(|v| Complex64::new(sign(p) * v, 0.0))
                    .collect()
            },
            0.5,
            ANALYTIC_ORDER,
            "sgn(p)/(1+p^2)",
        )
    }

    /// `e^{-p²}`.
    pub fn gaussian() -> Self {
        Self::with_derivatives(
            |p| Complex64::new((-p * p).exp(), 0.0),
            |p, order| {
                // ∂^k e^{-p²} = (-1)^k H_k(p) e^{-p²}, physicists' Hermite.
                let g = (-p * p).exp();
                let mut out = Vec::with_capacity(order + 1);
                let (mut h0, mut h1) = (1.0, 2.0 * p);
                for k in 0..=order {
                    let hk = if k == 0 { h0 } else { h1 };
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(Complex64::new(sign * hk * g, 0.0));
                    if k >= 1 {
                        let next = 2.0 * p * h1 - 2.0 * k as f64 * h0;
                        h0 = h1;
                        h1 = next;
                    }
                }
                out
            },
            0.5,
            ANALYTIC_ORDER,
            "gaussian",
        )
    }

    pub fn constant(value: f64) -> Self {
        Self::with_derivatives(
            move |_| Complex64::new(value, 0.0),
            move |_, order| {
                let mut out = vec![ZERO; order + 1];
                out[0] = Complex64::new(value, 0.0);
                out
            },
            0.5,
            ANALYTIC_ORDER,
            format!("constant {value}"),
        )
    }

    pub fn sine() -> Self {
        Self::with_derivatives(
            |p| Complex64::new(p.sin(), 0.0),
            |p, order| {
                (0..=order)
                    .map(|k| Complex64::new((p + k as f64 * PI / 2.0).sin(), 0.0))
                    .collect()
            },
            0.5,
            ANALYTIC_ORDER,
            "sin(p)",
        )
    }

    /// Same function with a different declared decay exponent.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn value(&self, p: f64) -> Complex64 {
        (self.eval)(p)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.derivatives.is_some()
    }

    /// `∂_p^k f(p)`.
    pub fn derivative(&self, k: usize, p: f64) -> Complex64 {
        match &self.derivatives {
            Some(d) => d(p, k)[k],
            None => self.central_difference(k, p),
        }
    }

    /// `[∂^0 f(p), …, ∂^order f(p)]`.
    pub fn derivatives(&self, p: f64, order: usize) -> Vec<Complex64> {
        match &self.derivatives {
            Some(d) => d(p, order),
            None => (0..=order).map(|k| self.central_difference(k, p)).collect(),
        }
    }

    fn central_difference(&self, k: usize, p: f64) -> Complex64 {
        if k == 0 {
            return self.value(p);
        }
        let scale = 1.0 + p.abs();
        let h = if k == 1 {
            1e-5 * scale
        } else {
            f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * scale
        };
        let mut acc = ZERO;
        let mut binom = 1.0;
        for j in 0..=k {
            let x = p + (k as f64 / 2.0 - j as f64) * h;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += self.value(x) * (sign * binom);
            binom = binom * (k - j) as f64 / (j as f64 + 1.0);
        }
        acc / h.powi(k as i32)
    }
}

/// Derivatives of `(1 + p²)^{-β}` by the recurrence obtained from
/// `(1 + p²) g' = -2βp g`.
fn inverse_power_derivatives(beta: f64, p: f64, order: usize) -> Vec<f64> {
    let q = 1.0 + p * p;
    let mut out = Vec::with_capacity(order + 1);
    out.push(q.powf(-beta));
    for k in 0..order {
        let kf = k as f64;
        let prev = if k == 0 { 0.0 } else { out[k - 1] };
        let next = -((2.0 * kf + 2.0 * beta) * p * out[k] + (kf * (kf - 1.0) + 2.0 * beta * kf) * prev) / q;
        out.push(next);
    }
    out
}

/// A function of `r ∈ ℝ \ {0}`.
#[derive(Clone)]
pub struct RadialProfile {
    eval: ValueFn,
    epsilon: f64,
    description: String,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("description", &self.description)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

impl RadialProfile {
    pub fn new<F>(eval: F, epsilon: f64, description: impl Into<String>) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            epsilon,
            description: description.into(),
        }
    }

    pub fn value(&self, r: f64) -> Complex64 {
        (self.eval)(r)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// True when the profile is finite at `±r` on a log grid over [1e-6, 1e3].
    pub fn is_finite_on_grid(&self) -> bool {
        (0..=90).all(|i| {
            let r = 10f64.powf(-6.0 + i as f64 / 10.0);
            let a = self.value(r);
            let b = self.value(-r);
            a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()
        })
    }
}

/// Accuracy targets for the transforms; tolerances refer to the returned,
/// `(2π)^{-1}`-normalised quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub tail_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-13,
            tail_tol: 1e-10,
            max_subdivisions: 20_000,
        }
    }
}

impl TransformOptions {
    /// Relative target for quantities that decay over many orders of magnitude.
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol,
            tail_tol: 1e-300,
            ..Self::default()
        }
    }
}

/// `∂_p^j [(ip)^k f(p)]` from `f`'s derivatives `fd[0..=j]`.
fn weighted_derivative(fd: &[Complex64], p: f64, k: usize, j: usize) -> Complex64 {
    if k == 0 {
        return fd[j];
    }
    let mut acc = ZERO;
    let mut binom = 1.0;
    for l in 0..=j.min(k) {
        // j choose l times k! / (k - l)!
        let falling: f64 = (0..l).map(|t| (k - t) as f64).product();
        acc += fd[j - l] * (binom * falling * p.powi((k - l) as i32));
        binom = binom * (j - l) as f64 / (l as f64 + 1.0);
    }
    acc * I.powi(k as i32)
}

fn breakpoints(limit: f64, r: f64) -> Vec<f64> {
    let width = PI / (2.0 * r.abs());
    let mut coarse = vec![0.0];
    let mut x = 1.0 / 16.0;
    while x < limit {
        coarse.push(x);
        x *= 2.0;
    }
    coarse.push(limit);
    let mut out = vec![0.0];
    for w in coarse.windows(2) {
        let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for i in 1..=pieces {
            out.push(if i == pieces {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * i as f64 / pieces as f64
            });
        }
    }
    out
}

/// `∫ e^{irp} (ip)^k f(p) dp` after `m` integrations by parts.
///
/// The two half-lines are folded onto [0, P]; beyond ±P the asymptotic
/// expansion in powers of `(ir)^{-1}` is summed while its terms decrease.
fn parts_integral(
    f: &ProfileFunction,
    r: f64,
    k: usize,
    m: usize,
    opts: &TransformOptions,
) -> Result<Estimate> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!("transform evaluated at r = {r}")));
    }
    if f.max_order() < m {
        return config(format!(
            "profile '{}' provides derivatives up to order {}, {} needed",
            f.description(),
            f.max_order(),
            m
        ));
    }
    let ir = Complex64::new(0.0, r);
    let spare = f.max_order() - m;
    let terms = spare.min(10);

    // Boundary terms at 0±: cancel for continuous profiles, carry jumps otherwise.
    let tiny = f64::MIN_POSITIVE;
    let fd_plus = f.derivatives(tiny, m.max(1) - 1);
    let fd_minus = f.derivatives(-tiny, m.max(1) - 1);
    let mut boundary = ZERO;
    let mut ir_pow = ir;
    for j in 0..m {
        let jump = weighted_derivative(&fd_minus, -tiny, k, j) - weighted_derivative(&fd_plus, tiny, k, j);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        boundary += jump * sign / ir_pow;
        ir_pow *= ir;
    }
    let scale = (-1.0 / ir).powi(m as i32);
    let scale_abs = r.abs().powi(-(m as i32));

    let integrand = |p: f64| {
        let fp = f.derivatives(p, m);
        let fm = f.derivatives(-p, m);
        let e = Complex64::from_polar(1.0, r * p);
        e * weighted_derivative(&fp, p, k, m) + e.conj() * weighted_derivative(&fm, -p, k, m)
    };

    let mut limit = 64.0 * (1.0f64 / r.abs()).max(1.0);
    if terms < 3 {
        limit *= 16.0;
    }
    let target_abs = 2.0 * PI * opts.abs_tol / scale_abs;
    let mut last = None;
    for _ in 0..5 {
        let tail = tail_series(f, r, k, m, limit, terms);
        let tol = Tolerance {
            abs: target_abs,
            rel: opts.rel_tol,
            max_subdivisions: opts.max_subdivisions,
        };
        let body = quad::integrate_panels(&integrand, &breakpoints(limit, r), &tol)?;
        let value = boundary + scale * (body.value + tail.value);
        let error = scale_abs * (body.error + tail.error);
        let tail_ok = scale_abs * tail.error <= 2.0 * PI * opts.tail_tol.max(opts.rel_tol * value.norm());
        last = Some(Estimate::new(value, error));
        if tail_ok {
            break;
        }
        limit *= 8.0;
    }
    Ok(last.expect("at least one pass"))
}

fn tail_series(f: &ProfileFunction, r: f64, k: usize, m: usize, limit: f64, terms: usize) -> Estimate {
    let ir = Complex64::new(0.0, r);
    let fp = f.derivatives(limit, m + terms);
    let fm = f.derivatives(-limit, m + terms);
    let e = Complex64::from_polar(1.0, r * limit);
    let mut sum = ZERO;
    let mut prev = f64::INFINITY;
    let mut prev2 = f64::INFINITY;
    let mut ir_pow = ir;
    for j in 0..=terms {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let t = (e.conj() * weighted_derivative(&fm, -limit, k, m + j)
            - e * weighted_derivative(&fp, limit, k, m + j))
            * sign
            / ir_pow;
        let size = t.norm();
        if size == 0.0 {
            prev = 0.0;
            break;
        }
        if !size.is_finite() || size >= prev {
            break;
        }
        sum += t;
        prev2 = prev;
        prev = size;
        ir_pow *= ir;
    }
    let error = if prev == 0.0 {
        0.0
    } else if prev2.is_finite() {
        prev * prev / prev2
    } else {
        prev
    };
    Estimate::new(sum, error)
}

/// `∂_r^k f̌(r) = (2π)^{-1} ∫ e^{irp} (ip)^k f(p) dp` with its error estimate.
///
/// Integrates by parts `k + 1` times so the remaining integrand decays like
/// `|p|^{-1-ε}`.
pub fn inverse_fourier_derivative(
    f: &ProfileFunction,
    r: f64,
    k: usize,
    opts: &TransformOptions,
) -> Result<Estimate> {
    let est = parts_integral(f, r, k, k + 1, opts)?;
    Ok(Estimate::new(est.value / (2.0 * PI), est.error / (2.0 * PI)))
}

/// `f̌(r) = (2π)^{-1} ∫ e^{irp} f(p) dp`.
pub fn inverse_fourier_profile(f: &ProfileFunction, r: f64) -> Result<Complex64> {
    inverse_fourier_profile_with(f, r, &TransformOptions::default()).map(|e| e.value)
}

pub fn inverse_fourier_profile_with(
    f: &ProfileFunction,
    r: f64,
    opts: &TransformOptions,
) -> Result<Estimate> {
    inverse_fourier_derivative(f, r, 0, opts)
}

/// `f̌(r)` by quadrature of `e^{irp} f(p)` itself, without integration by
/// parts; only meaningful for integrable `f`.
pub fn inverse_fourier_direct(f: &ProfileFunction, r: f64, opts: &TransformOptions) -> Result<Estimate> {
    let est = parts_integral(f, r, 0, 0, opts)?;
    Ok(Estimate::new(est.value / (2.0 * PI), est.error / (2.0 * PI)))
}

/// `∫ e^{-irp} V(r) dr` over ℝ: the rule covers r > 0 and the reflected
/// nodes cover r < 0.
pub fn forward_fourier_radial(v: &RadialProfile, rule: Option<&RadialRule>, p: f64) -> Result<Complex64> {
    let Some(rule) = rule else {
        return config("forward transform needs a radial rule");
    };
    let terms: Vec<Complex64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&r, &w)| {
            let e = Complex64::from_polar(1.0, -r * p);
            (e * v.value(r) + e.conj() * v.value(-r)) * w
        })
        .collect();
    Ok(quad::pairwise_sum(&terms))
}

/// `(i sgn r)^m` for r > 0; the value for r < 0 is `(-1)^m` times this.
fn multiplier_positive(m: i32) -> Complex64 {
    I.powi(m.rem_euclid(4))
}

/// Samples of `f̌` at `±r_j` on a radial rule; synthesises `f` and its
/// multiplier images `H^m f` by the forward transform.
#[derive(Debug, Clone)]
pub struct Spectrum {
    rule: RadialRule,
    positive: Vec<Complex64>,
    negative: Vec<Complex64>,
    power: i32,
    epsilon: f64,
    description: String,
}

impl Spectrum {
    /// Spectrum of `f` resolved for synthesis at `|p| <= p_max`.
    pub fn new(f: &ProfileFunction, p_max: f64, opts: &TransformOptions) -> Result<Self> {
        let rule = RadialRule::new(2, f.epsilon().clamp(1e-3, 0.5), 1e-12, 0.5 * p_max.abs().max(1.0))?;
        let mut positive = Vec::with_capacity(rule.len());
        let mut negative = Vec::with_capacity(rule.len());
        for &r in rule.nodes() {
            positive.push(inverse_fourier_profile_with(f, r, opts)?.value);
            negative.push(inverse_fourier_profile_with(f, -r, opts)?.value);
        }
        Ok(Self {
            rule,
            positive,
            negative,
            power: 0,
            epsilon: f.epsilon(),
            description: f.description().to_string(),
        })
    }

    /// Spectrum multiplied by `(i sgn r)^m`, composing with earlier powers.
    pub fn hilbert(&self, m: i32) -> Self {
        let mp = multiplier_positive(m);
        let mn = if m.rem_euclid(2) == 0 { mp } else { -mp };
        Self {
            rule: self.rule.clone(),
            positive: self.positive.iter().map(|v| v * mp).collect(),
            negative: self.negative.iter().map(|v| v * mn).collect(),
            power: self.power + m,
            epsilon: self.epsilon,
            description: self.description.clone(),
        }
    }

    /// Accumulated Hilbert power.
    pub fn power(&self) -> i32 {
        self.power
    }

    /// `∂_p^k` of the synthesised function at `p`.
    pub fn synthesize(&self, p: f64, k: usize) -> Complex64 {
        let kk = k as i32;
        let terms: Vec<Complex64> = self
            .rule
            .nodes()
            .iter()
            .zip(self.rule.weights())
            .zip(self.positive.iter().zip(&self.negative))
            .map(|((&r, &w), (pos, neg))| {
                let e = Complex64::from_polar(1.0, -r * p);
                let dk = Complex64::new(0.0, -r).powi(kk);
                (e * dk * pos + e.conj() * dk.conj() * neg) * w
            })
            .collect();
        quad::pairwise_sum(&terms)
    }

    /// The synthesised function as a profile with spectral derivatives.
    pub fn to_profile(&self) -> ProfileFunction {
        let me = Arc::new(self.clone());
        let for_eval = Arc::clone(&me);
        let description = format!("H^{} [{}]", self.power, self.description);
        ProfileFunction::with_derivatives(
            move |p| for_eval.synthesize(p, 0),
            move |p, order| (0..=order).map(|k| me.synthesize(p, k)).collect(),
            self.epsilon,
            ANALYTIC_ORDER,
            description,
        )
    }
}

/// `(H^m f)(p)` for any integer `m`.
///
/// Even powers are returned exactly as `(-1)^{m/2} f(p)`; odd powers use the
/// multiplier `(i sgn r)^m` on `f̌` followed by the forward transform.
pub fn hilbert_power(f: &ProfileFunction, m: i32, p: f64) -> Result<Complex64> {
    if m.rem_euclid(2) == 0 {
        let sign = if (m / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return Ok(f.value(p) * sign);
    }
    let spectrum = Spectrum::new(f, p.abs(), &TransformOptions::default())?;
    Ok(spectrum.hilbert(m).synthesize(p, 0))
}

/// `(Hf)(p) = π^{-1} ∫_δ^T [f(p - t) - f(p + t)] / t dt` with symmetric
/// excision `δ = 1e-6` and truncation `T = cutoff`.
pub fn hilbert_pv_oracle(f: &ProfileFunction, p: f64, cutoff: f64) -> Result<Estimate> {
    if !(cutoff >= 1e3) {
        return config(format!("principal-value cutoff must be >= 1e3, got {cutoff}"));
    }
    let excision = 1e-6;
    let mut points = vec![excision];
    let mut t = 2.0 * excision;
    while t < cutoff {
        points.push(t);
        t *= 2.0;
    }
    points.push(cutoff);
    let est = quad::integrate_panels(
        |t| (f.value(p - t) - f.value(p + t)) / t,
        &points,
        &Tolerance::absolute(1e-11),
    )?;
    Ok(Estimate::new(est.value / PI, est.error / PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Tolerance;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let v = inverse_fourier_profile(&ProfileFunction::gaussian(), 1.0).unwrap();
        let exact = PI.sqrt() * (-0.25f64).exp() / (2.0 * PI);
        assert!((exact - 0.219_696).abs() < 1e-6);
        assert!(close(v, Complex64::new(exact, 0.0), 1e-10), "{v}");
    }

    #[test]
    fn lorentzian_transform_matches_closed_form() {
        let v = inverse_fourier_profile(&ProfileFunction::lorentzian(), 2.0).unwrap();
        let exact = (-2.0f64).exp() / 2.0;
        assert!((exact - 0.067_668).abs() < 1e-6);
        assert!(close(v, Complex64::new(exact, 0.0), 1e-10), "{v}");
    }

    #[test]
    fn transform_of_real_even_profile_is_conjugate_symmetric() {
        let f = ProfileFunction::inverse_power(0.25);
        for r in [0.3, 1.7, 6.0] {
            let a = inverse_fourier_profile(&f, r).unwrap();
            let b = inverse_fourier_profile(&f, -r).unwrap();
            assert!(close(a, b.conj(), 1e-10));
        }
    }

    #[test]
    fn transform_rejects_zero_frequency() {
        let f = ProfileFunction::gaussian();
        assert!(matches!(inverse_fourier_profile(&f, 0.0), Err(Error::Domain(_))));
    }

    fn bessel_k(nu: f64, r: f64) -> f64 {
        quad::integrate(
            |t| Complex64::new((-r * t.cosh()).exp() * (nu * t).cosh(), 0.0),
            0.0,
            (40.0 / r).max(2.0).ln() + 4.0,
            &Tolerance::absolute(1e-16),
        )
        .unwrap()
        .value
        .re
    }

    #[test]
    fn slowly_decaying_profile_matches_bessel_kernel() {
        let f = ProfileFunction::inverse_power(0.25);
        let g14 = statrs::function::gamma::gamma(0.25);
        for r in [1e-3, 0.1, 1.0, 5.0] {
            let v = inverse_fourier_profile(&f, r).unwrap();
            let exact = (r / 2.0).powf(-0.25) * bessel_k(0.25, r) / (PI.sqrt() * g14);
            assert!((v.re - exact).abs() <= 1e-8 * exact.abs().max(1e-3), "r {r}: {v} vs {exact}");
            assert!(v.im.abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_of_transform_matches_differentiated_closed_form() {
        // f̌ = e^{-|r|}/2 for the Lorentzian, so ∂_r f̌ = -e^{-r}/2 for r > 0.
        let f = ProfileFunction::lorentzian();
        let d = inverse_fourier_derivative(&f, 1.5, 1, &TransformOptions::default()).unwrap();
        assert!(close(d.value, Complex64::new(-(-1.5f64).exp() / 2.0, 0.0), 1e-9), "{:?}", d);
    }

    #[test]
    fn numeric_derivatives_are_close_to_analytic() {
        let analytic = ProfileFunction::inverse_power(0.25);
        let numeric = ProfileFunction::from_fn(|p| Complex64::new((1.0 + p * p).powf(-0.25), 0.0), 0.5, "n");
        for p in [-3.0, 0.4, 10.0] {
            for k in 1..=3 {
                let a = analytic.derivative(k, p);
                let b = numeric.derivative(k, p);
                assert!((a - b).norm() < 1e-4 * (1.0 + a.norm()), "k {k} p {p}");
            }
        }
    }

    #[test]
    fn numeric_profile_transform() {
        let numeric = ProfileFunction::from_fn(|p| Complex64::new(1.0 / (1.0 + p * p), 0.0), 0.5, "n");
        let v = inverse_fourier_profile(&numeric, 1.0).unwrap();
        assert!((v.re - (-1.0f64).exp() / 2.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn forward_radial_examples() {
        let rule = RadialRule::new(2, 0.5, 1e-12, 1.0).unwrap();
        let two_sided = RadialProfile::new(|r: f64| Complex64::new((-r.abs()).exp(), 0.0), 0.5, "e^-|r|");
        let v = forward_fourier_radial(&two_sided, Some(&rule), 0.0).unwrap();
        assert!(close(v, Complex64::new(2.0, 0.0), 1e-10));

        let one_sided = RadialProfile::new(
            |r: f64| if r > 0.0 { Complex64::new(r.powf(-0.5) * (-r).exp(), 0.0) } else { ZERO },
            0.5,
            "theta r^-1/2 e^-r",
        );
        let at1 = forward_fourier_radial(&one_sided, Some(&rule), 1.0).unwrap();
        let exact = Complex64::new(1.0, 1.0).powf(-0.5) * PI.sqrt();
        assert!(close(at1, exact, 1e-10));
        assert!(close(exact, Complex64::new(1.376_996_3, -0.570_370_6), 1e-6));
        let at0 = forward_fourier_radial(&one_sided, Some(&rule), 0.0).unwrap();
        assert!(close(at0, Complex64::new(PI.sqrt(), 0.0), 1e-10));
        assert!(matches!(forward_fourier_radial(&one_sided, None, 0.0), Err(Error::Configuration(_))));
        assert!(one_sided.is_finite_on_grid());
    }

    #[test]
    fn even_hilbert_powers_are_exact() {
        let f = ProfileFunction::inverse_power(0.25);
        for p in [-2.0, 0.0, 3.5] {
            assert_eq!(hilbert_power(&f, 0, p).unwrap(), f.value(p));
            assert_eq!(hilbert_power(&f, 2, p).unwrap() + f.value(p), ZERO);
            assert_eq!(hilbert_power(&f, -2, p).unwrap(), -f.value(p));
            assert_eq!(hilbert_power(&f, 4, p).unwrap(), f.value(p));
        }
    }

    #[test]
    fn hilbert_of_lorentzian() {
        let f = ProfileFunction::lorentzian();
        let h = hilbert_power(&f, 1, 3.0).unwrap();
        assert!(close(h, Complex64::new(0.3, 0.0), 1e-8), "{h}");
        let hm = hilbert_power(&f, -1, 3.0).unwrap();
        assert!(close(hm, Complex64::new(-0.3, 0.0), 1e-8), "{hm}");
    }

    #[test]
    fn principal_value_oracle_examples() {
        let f = ProfileFunction::lorentzian();
        assert!(hilbert_pv_oracle(&f, 0.0, 1e6).unwrap().value.norm() < 1e-12);
        let h1 = hilbert_pv_oracle(&f, 1.0, 1e6).unwrap().value;
        assert!(close(h1, Complex64::new(0.5, 0.0), 1e-5), "{h1}");
        let g = ProfileFunction::inverse_power(0.25);
        let a = hilbert_pv_oracle(&g, 2.0, 1e6).unwrap().value;
        let b = hilbert_power(&g, 1, 2.0).unwrap();
        assert!(close(a, b, 1e-3), "{a} vs {b}");
        assert!(matches!(hilbert_pv_oracle(&f, 0.0, 10.0), Err(Error::Configuration(_))));
    }

    #[test]
    fn spectrum_round_trips_gaussian() {
        let f = ProfileFunction::gaussian();
        let spectrum = Spectrum::new(&f, 3.0, &TransformOptions::default()).unwrap();
        for i in 0..=12 {
            let p = -3.0 + 0.5 * i as f64;
            assert!(close(spectrum.synthesize(p, 0), f.value(p), 1e-8), "p {p}");
        }
        let back = spectrum.hilbert(1).hilbert(-1);
        assert_eq!(back.power(), 0);
        assert!(close(back.synthesize(0.7, 0), f.value(0.7), 1e-8));
    }
}

