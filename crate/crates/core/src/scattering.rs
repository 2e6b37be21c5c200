//! Amplitudes `A(ζ, σ, r)` on the light cone, scattering data `f(θ, ω, p)`,
//! the transform pair between them, and samplers for the hypotheses each
//! side must satisfy.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{config, Error, Result};
use crate::fit::linear_fit;
use crate::geometry::{RadialLayout, RadialRule, SphereRule, TailModel};
use crate::quad::{self, PairwiseAccumulator};
use crate::report::{coordinate_columns, CheckReport, Table};
use crate::transforms::{inverse_fourier_profile_with, ProfileFunction, TransformOptions, ANALYTIC_ORDER};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub type AngularFn = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;
pub type RadialFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

pub fn check_dims(d: usize, n: usize) -> Result<()> {
    for k in [d, n] {
        if !(1..=3).contains(&k) {
            return Err(Error::Dimension(k));
        }
    }
    Ok(())
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 0.5 {
        Ok(())
    } else {
        config(format!("epsilon must lie in (0, 1/2], got {epsilon}"))
    }
}

/// `c = (2π)^{-N/2-1}`.
pub fn normalization(total_dim: usize) -> f64 {
    (2.0 * PI).powf(-(total_dim as f64) / 2.0 - 1.0)
}

/// Phase factors `(e^{iπ(n-d)/4}, e^{iπ(d-n)/4})` of the r > 0 and r < 0 branches.
pub fn branch_phases(d: usize, n: usize) -> (Complex64, Complex64) {
    let t = PI * (n as f64 - d as f64) / 4.0;
    (Complex64::from_polar(1.0, t), Complex64::from_polar(1.0, -t))
}

pub(crate) fn negated(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// Monomial `c · ζ^α σ^β` in the ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    #[serde(default)]
    pub zeta: Vec<u32>,
    #[serde(default)]
    pub sigma: Vec<u32>,
}

/// Polynomial in `(ζ, σ)`, evaluated on the unit spheres; off the spheres
/// it is continued homogeneously of degree 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AngularPolynomial {
    pub terms: Vec<Monomial>,
}

impl AngularPolynomial {
    pub fn one() -> Self {
        Self {
            terms: vec![Monomial {
                coefficient: 1.0,
                zeta: vec![],
                sigma: vec![],
            }],
        }
    }

    pub fn eval(&self, zeta: &[f64], sigma: &[f64]) -> f64 {
        let z = unit(zeta);
        let s = unit(sigma);
        self.terms
            .iter()
            .map(|m| {
                let pz: f64 = m.zeta.iter().enumerate().map(|(i, &e)| z.get(i).copied().unwrap_or(0.0).powi(e as i32)).product();
                let ps: f64 = m.sigma.iter().enumerate().map(|(i, &e)| s.get(i).copied().unwrap_or(0.0).powi(e as i32)).product();
                m.coefficient * pz * ps
            })
            .sum()
    }

    fn validate(&self, d: usize, n: usize) -> Result<()> {
        for m in &self.terms {
            if m.zeta.len() > d || m.sigma.len() > n {
                return config(format!(
                    "monomial exponents {:?}/{:?} exceed dimensions d = {d}, n = {n}",
                    m.zeta, m.sigma
                ));
            }
            if !m.coefficient.is_finite() {
                return config("monomial coefficient is not finite");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RadialKind {
    /// `r^{N/2-2+ε} e^{-r}`.
    GammaExp,
    Other,
}

/// One separable piece `angular(ζ, σ) · radial(r)`.
#[derive(Clone)]
pub struct AmplitudeTerm {
    angular: AngularFn,
    radial: RadialFn,
    kind: RadialKind,
}

impl AmplitudeTerm {
    pub fn new(angular: AngularFn, radial: RadialFn, kind: RadialKind) -> Self {
        Self { angular, radial, kind }
    }

    pub fn angular(&self, zeta: &[f64], sigma: &[f64]) -> Complex64 {
        (self.angular)(zeta, sigma)
    }

    pub fn radial(&self, r: f64) -> Complex64 {
        (self.radial)(r)
    }

    pub fn kind(&self) -> RadialKind {
        self.kind
    }
}

/// Spectral density `A(ζ, σ, r)` on `S^{d-1} × S^{n-1} × (0, ∞)`, stored as a
/// sum of separable terms.
#[derive(Clone)]
pub struct Amplitude {
    d: usize,
    n: usize,
    epsilon: f64,
    tail_order: u32,
    angular_max_order: u32,
    tail: TailModel,
    terms: Vec<AmplitudeTerm>,
    description: String,
}

impl std::fmt::Debug for Amplitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Amplitude")
            .field("d", &self.d)
            .field("n", &self.n)
            .field("epsilon", &self.epsilon)
            .field("tail_order", &self.tail_order)
            .field("terms", &self.terms.len())
            .field("description", &self.description)
            .finish()
    }
}

impl Amplitude {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        n: usize,
        epsilon: f64,
        tail_order: u32,
        angular_max_order: u32,
        tail: TailModel,
        terms: Vec<AmplitudeTerm>,
        description: impl Into<String>,
    ) -> Result<Self> {
        check_dims(d, n)?;
        check_epsilon(epsilon)?;
        Ok(Self {
            d,
            n,
            epsilon,
            tail_order,
            angular_max_order,
            tail,
            terms,
            description: description.into(),
        })
    }

    /// `P(ζ, σ) r^{N/2-2+ε} e^{-r}`.
    pub fn gamma_exp(d: usize, n: usize, epsilon: f64, polynomial: AngularPolynomial) -> Result<Self> {
        check_dims(d, n)?;
        polynomial.validate(d, n)?;
        let angular: AngularFn = Arc::new(move |z: &[f64], s: &[f64]| Complex64::new(polynomial.eval(z, s), 0.0));
        Self::new(
            d,
            n,
            epsilon,
            8,
            2,
            TailModel::Exponential,
            vec![gamma_exp_term(d + n, epsilon, angular)],
            "gamma_exp",
        )
    }

    /// `cap_θ(ζ) cap_ω(σ) r^{N/2-2+ε} e^{-r}` with `cap(γ) = cos(πγ/(2w))^q`
    /// for angular distance `γ < w` and zero beyond.
    pub fn angular_bump(
        d: usize,
        n: usize,
        epsilon: f64,
        theta: &[f64],
        omega: &[f64],
        width: f64,
        power: u32,
    ) -> Result<Self> {
        check_dims(d, n)?;
        if theta.len() != d || omega.len() != n {
            return config("bump centres must have d and n components");
        }
        if !(width > 0.0 && width <= PI) {
            return config(format!("bump width must lie in (0, π], got {width}"));
        }
        let theta = unit(theta);
        let omega = unit(omega);
        let angular: AngularFn = Arc::new(move |z: &[f64], s: &[f64]| {
            Complex64::new(cap(&theta, z, width, power) * cap(&omega, s, width, power), 0.0)
        });
        Self::new(
            d,
            n,
            epsilon,
            8,
            2,
            TailModel::Exponential,
            vec![gamma_exp_term(d + n, epsilon, angular)],
            "angular_bump",
        )
    }

    pub fn zero(d: usize, n: usize, epsilon: f64) -> Result<Self> {
        Self::new(d, n, epsilon, 8, 2, TailModel::Exponential, vec![], "zero")
    }

    /// `r^{N/2-2+ε}`: right behaviour at the origin, no decay at infinity.
    pub fn without_tail(d: usize, n: usize, epsilon: f64) -> Result<Self> {
        let a = (d + n) as f64 / 2.0 - 2.0 + epsilon;
        let term = AmplitudeTerm::new(
            Arc::new(|_: &[f64], _: &[f64]| Complex64::new(1.0, 0.0)),
            Arc::new(move |r: f64| Complex64::new(r.powf(a), 0.0)),
            RadialKind::Other,
        );
        Self::new(d, n, epsilon, 0, 2, TailModel::Exponential, vec![term], "gamma_exp without tail")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_dim(&self) -> usize {
        self.d + self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tail_order(&self) -> u32 {
        self.tail_order
    }

    pub fn angular_max_order(&self) -> u32 {
        self.angular_max_order
    }

    pub fn tail_model(&self) -> TailModel {
        self.tail
    }

    pub fn terms(&self) -> &[AmplitudeTerm] {
        &self.terms
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `N/2 - 2 + ε`.
    pub fn radial_exponent(&self) -> f64 {
        self.total_dim() as f64 / 2.0 - 2.0 + self.epsilon
    }

    /// `A(ζ, σ, r)` for r > 0.
    pub fn eval(&self, zeta: &[f64], sigma: &[f64], r: f64) -> Complex64 {
        self.terms.iter().map(|t| t.angular(zeta, sigma) * t.radial(r)).sum()
    }

    /// `α · A`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|t| {
                let angular = Arc::clone(&t.angular);
                AmplitudeTerm::new(Arc::new(move |z: &[f64], s: &[f64]| alpha * angular(z, s)), Arc::clone(&t.radial), t.kind)
            })
            .collect();
        out.description = format!("({alpha}) * {}", self.description);
        out
    }

    /// `A + B`; both must share dimensions and ε.
    pub fn plus(&self, other: &Amplitude) -> Result<Self> {
        if self.d != other.d || self.n != other.n || self.epsilon != other.epsilon {
            return config("amplitudes with different (d, n, ε) cannot be added");
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.tail_order = self.tail_order.min(other.tail_order);
        out.angular_max_order = self.angular_max_order.min(other.angular_max_order);
        out.description = format!("{} + {}", self.description, other.description);
        Ok(out)
    }

    /// Same amplitude with every angular factor conjugated.
    pub fn conjugated(&self) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|t| {
                let angular = Arc::clone(&t.angular);
                let radial = Arc::clone(&t.radial);
                AmplitudeTerm::new(
                    Arc::new(move |z: &[f64], s: &[f64]| angular(z, s).conj()),
                    Arc::new(move |r: f64| radial(r).conj()),
                    t.kind,
                )
            })
            .collect();
        out
    }

    /// `(ζ, σ, r) ↦ A(-ζ, -σ, r)`.
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|t| {
                let angular = Arc::clone(&t.angular);
                AmplitudeTerm::new(
                    Arc::new(move |z: &[f64], s: &[f64]| angular(&negated(z), &negated(s))),
                    Arc::clone(&t.radial),
                    t.kind,
                )
            })
            .collect();
        out.description = format!("reflected {}", self.description);
        out
    }

    /// Every term carries the `r^{N/2-2+ε} e^{-r}` radial profile.
    pub fn is_gamma_exp(&self) -> bool {
        self.terms.iter().all(|t| t.kind == RadialKind::GammaExp)
    }
}

fn gamma_exp_term(total_dim: usize, epsilon: f64, angular: AngularFn) -> AmplitudeTerm {
    let a = total_dim as f64 / 2.0 - 2.0 + epsilon;
    AmplitudeTerm::new(angular, Arc::new(move |r: f64| Complex64::new(r.powf(a) * (-r).exp(), 0.0)), RadialKind::GammaExp)
}

fn cap(center: &[f64], v: &[f64], width: f64, power: u32) -> f64 {
    let v = unit(v);
    let c: f64 = center.iter().zip(&v).map(|(a, b)| a * b).sum();
    let gamma = c.clamp(-1.0, 1.0).acos();
    if gamma >= width {
        0.0
    } else {
        (PI * gamma / (2.0 * width)).cos().powi(power as i32)
    }
}

/// `A(ζ, σ, r)` continued to r < 0 by `A(ζ, σ, -r) = A(-ζ, -σ, r)`.
pub fn extend_amplitude(a: &Amplitude, zeta: &[f64], sigma: &[f64], r: f64) -> Result<Complex64> {
    if r > 0.0 {
        Ok(a.eval(zeta, sigma, r))
    } else if r < 0.0 {
        Ok(a.eval(&negated(zeta), &negated(sigma), -r))
    } else {
        Err(Error::Domain("amplitude is not defined at r = 0".into()))
    }
}

/// `f(θ, ω, p) = c ∫_ℝ e^{-irp} (e^{iπ(n-d)/4} Θ(r) + e^{iπ(d-n)/4} Θ(-r)) |r|^{-N/2+1} A(θ, ω, r) dr`
/// on a caller-supplied radial rule (both half-lines share its nodes).
pub fn amplitude_to_scattering(a: &Amplitude, theta: &[f64], omega: &[f64], p: f64, rule: &RadialRule) -> Result<Complex64> {
    if (rule.singularity_exponent() - a.radial_exponent()).abs() > 1e-12 {
        return config(format!(
            "radial rule built for exponent {} but the amplitude has {}",
            rule.singularity_exponent(),
            a.radial_exponent()
        ));
    }
    let n_total = a.total_dim();
    let c = normalization(n_total);
    let (plus, minus) = branch_phases(a.d(), a.n());
    let neg_theta = negated(theta);
    let neg_omega = negated(omega);
    let terms: Vec<Complex64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&r, &w)| {
            let e = Complex64::from_polar(1.0, -r * p);
            let radial = w * r.powf(1.0 - n_total as f64 / 2.0);
            (e * plus * a.eval(theta, omega, r) + e.conj() * minus * a.eval(&neg_theta, &neg_omega, r)) * radial
        })
        .collect();
    Ok(quad::pairwise_sum(&terms) * c)
}

const MAX_CACHED_LEVEL: u32 = 10;
const AMPLITUDE_RULE_TOL: f64 = 1e-16;
const AMPLITUDE_DERIVATIVE_ORDER: usize = 6;

struct Level {
    nodes: Vec<f64>,
    /// `c · w_j · r_j^{1-N/2} · radial_t(r_j)` per term.
    weights: Vec<Vec<Complex64>>,
}

/// Per-term radial sums `(Σ W (-ir)^k e^{-irp}, Σ W (ir)^k e^{irp})` for k = 0..=order.
type RadialSums = Vec<(Vec<Complex64>, Vec<Complex64>)>;

struct AmplitudeSource {
    amplitude: Amplitude,
    levels: Vec<OnceLock<Level>>,
    streamed: Mutex<HashMap<(u64, usize), Arc<RadialSums>>>,
}

impl AmplitudeSource {
    fn level_for(p: f64) -> Option<u32> {
        let s = (p.abs() / 2.0).max(1.0);
        let j = s.log2().ceil().max(0.0) as u32;
        (j <= MAX_CACHED_LEVEL).then_some(j)
    }

    fn layout(&self, s: f64) -> RadialLayout {
        RadialLayout::new(
            self.amplitude.total_dim(),
            self.amplitude.epsilon(),
            AMPLITUDE_RULE_TOL,
            s,
            self.amplitude.tail_model(),
        )
        .expect("rule parameters validated at construction")
    }

    fn level(&self, j: u32) -> &Level {
        self.levels[j as usize].get_or_init(|| {
            let layout = self.layout(2f64.powi(j as i32));
            let c = normalization(self.amplitude.total_dim());
            let power = 1.0 - self.amplitude.total_dim() as f64 / 2.0;
            let mut nodes = Vec::new();
            let mut weights = vec![Vec::new(); self.amplitude.terms().len()];
            for i in 0..layout.panel_count() {
                let (x, w) = layout.panel(i);
                for q in 0..x.len() {
                    nodes.push(x[q]);
                    let base = c * w[q] * x[q].powf(power);
                    for (t, term) in self.amplitude.terms().iter().enumerate() {
                        weights[t].push(term.radial(x[q]) * base);
                    }
                }
            }
            Level { nodes, weights }
        })
    }

    fn sums(&self, p: f64, order: usize) -> Arc<RadialSums> {
        let terms = self.amplitude.terms().len();
        if let Some(j) = Self::level_for(p) {
            let level = self.level(j);
            let mut out = Vec::with_capacity(terms);
            for t in 0..terms {
                let mut plus = vec![PairwiseAccumulator::new(); order + 1];
                let mut minus = vec![PairwiseAccumulator::new(); order + 1];
                for (&r, &w) in level.nodes.iter().zip(&level.weights[t]) {
                    accumulate(&mut plus, &mut minus, r, w, p);
                }
                out.push((plus.iter().map(|a| a.total()).collect(), minus.iter().map(|a| a.total()).collect()));
            }
            return Arc::new(out);
        }
        let key = (p.to_bits(), order);
        if let Some(hit) = self.streamed.lock().expect("cache lock").get(&key) {
            return Arc::clone(hit);
        }
        let s = 2f64.powf((p.abs() / 2.0).log2().ceil());
        let layout = self.layout(s);
        let c = normalization(self.amplitude.total_dim());
        let power = 1.0 - self.amplitude.total_dim() as f64 / 2.0;
        let mut plus = vec![vec![PairwiseAccumulator::new(); order + 1]; terms];
        let mut minus = vec![vec![PairwiseAccumulator::new(); order + 1]; terms];
        for i in 0..layout.panel_count() {
            let (x, w) = layout.panel(i);
            for q in 0..x.len() {
                let base = c * w[q] * x[q].powf(power);
                for (t, term) in self.amplitude.terms().iter().enumerate() {
                    accumulate(&mut plus[t], &mut minus[t], x[q], term.radial(x[q]) * base, p);
                }
            }
        }
        let out: RadialSums = plus
            .iter()
            .zip(&minus)
            .map(|(pl, mi)| (pl.iter().map(|a| a.total()).collect(), mi.iter().map(|a| a.total()).collect()))
            .collect();
        let out = Arc::new(out);
        self.streamed.lock().expect("cache lock").insert(key, Arc::clone(&out));
        out
    }
}

fn accumulate(plus: &mut [PairwiseAccumulator], minus: &mut [PairwiseAccumulator], r: f64, w: Complex64, p: f64) {
    let e = Complex64::from_polar(1.0, -r * p);
    let mut vp = w * e;
    let mut vm = w * e.conj();
    let dp = Complex64::new(0.0, -r);
    for k in 0..plus.len() {
        plus[k].add(vp);
        minus[k].add(vm);
        vp *= dp;
        vm *= dp.conj();
    }
}

enum Source {
    Amplitude(AmplitudeSource),
    ClosedForm(Amplitude),
    Profile(ProfileFunction),
}

/// Scattering data `f(θ, ω, p)` with derivative access in p.
#[derive(Clone)]
pub struct ScatteringData {
    d: usize,
    n: usize,
    epsilon: f64,
    flip_negative: bool,
    source: Arc<Source>,
    description: String,
}

impl std::fmt::Debug for ScatteringData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScatteringData")
            .field("d", &self.d)
            .field("n", &self.n)
            .field("epsilon", &self.epsilon)
            .field("flip_negative", &self.flip_negative)
            .field("description", &self.description)
            .finish()
    }
}

impl ScatteringData {
    /// Scattering data of `A`, evaluated by radial quadrature on rules refined
    /// with |p| (cached up to |p| = 2048, streamed beyond).
    pub fn from_amplitude(a: &Amplitude) -> Result<Self> {
        RadialLayout::new(a.total_dim(), a.epsilon(), AMPLITUDE_RULE_TOL, 1.0, a.tail_model())?;
        Ok(Self {
            d: a.d(),
            n: a.n(),
            epsilon: a.epsilon(),
            flip_negative: false,
            source: Arc::new(Source::Amplitude(AmplitudeSource {
                amplitude: a.clone(),
                levels: (0..=MAX_CACHED_LEVEL).map(|_| OnceLock::new()).collect(),
                streamed: Mutex::new(HashMap::new()),
            })),
            description: format!("f[{}]", a.description()),
        })
    }

    /// Closed form `cΓ(ε)[φ₊ P(θ,ω)(1+ip)^{-ε} + φ₋ P(-θ,-ω)(1-ip)^{-ε}]`,
    /// available when every term of `A` has the radial factor `r^{N/2-2+ε} e^{-r}`.
    pub fn closed_form(a: &Amplitude) -> Result<Self> {
        if !a.is_gamma_exp() {
            return config("closed-form scattering data needs a gamma_exp-type amplitude");
        }
        Ok(Self {
            d: a.d(),
            n: a.n(),
            epsilon: a.epsilon(),
            flip_negative: false,
            source: Arc::new(Source::ClosedForm(a.clone())),
            description: format!("closed form f[{}]", a.description()),
        })
    }

    /// Angle-independent data `f(θ, ω, p) = profile(p)`.
    pub fn from_profile(d: usize, n: usize, profile: ProfileFunction) -> Result<Self> {
        check_dims(d, n)?;
        let description = profile.description().to_string();
        Ok(Self {
            d,
            n,
            epsilon: profile.epsilon(),
            flip_negative: false,
            source: Arc::new(Source::Profile(profile)),
            description,
        })
    }

    /// Negative control: the r < 0 branch enters with the wrong sign.
    pub fn with_flipped_negative_branch(&self) -> Result<Self> {
        if matches!(*self.source, Source::Profile(_)) {
            return config("sign flip of the r < 0 branch needs amplitude-backed data");
        }
        let mut out = self.clone();
        out.flip_negative = !self.flip_negative;
        out.description = format!("sign-flipped {}", self.description);
        Ok(out)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_dim(&self) -> usize {
        self.d + self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn eval(&self, theta: &[f64], omega: &[f64], p: f64) -> Complex64 {
        self.derivatives(theta, omega, p, 0)[0]
    }

    /// `[∂_p^0 f, …, ∂_p^order f]` at `(θ, ω, p)`.
    pub fn derivatives(&self, theta: &[f64], omega: &[f64], p: f64, order: usize) -> Vec<Complex64> {
        let (plus, minus) = branch_phases(self.d, self.n);
        let minus = if self.flip_negative { -minus } else { minus };
        let neg_theta = negated(theta);
        let neg_omega = negated(omega);
        match &*self.source {
            Source::Profile(f) => f.derivatives(p, order),
            Source::Amplitude(src) => {
                let sums = src.sums(p, order);
                let mut out = vec![ZERO; order + 1];
                for (term, (sp, sm)) in src.amplitude.terms().iter().zip(sums.iter()) {
                    let ap = plus * term.angular(theta, omega);
                    let am = minus * term.angular(&neg_theta, &neg_omega);
                    for k in 0..=order {
                        out[k] += ap * sp[k] + am * sm[k];
                    }
                }
                out
            }
            Source::ClosedForm(a) => {
                let scale = normalization(self.total_dim()) * statrs::function::gamma::gamma(self.epsilon);
                let eps = self.epsilon;
                let bp = Complex64::new(1.0, p);
                let bm = Complex64::new(1.0, -p);
                let mut out = vec![ZERO; order + 1];
                let mut falling = 1.0;
                let mut ik = Complex64::new(1.0, 0.0);
                for k in 0..=order {
                    let dp = ik * falling * bp.powf(-eps - k as f64);
                    let dm = ik.conj() * falling * bm.powf(-eps - k as f64);
                    for term in a.terms() {
                        out[k] += plus * term.angular(theta, omega) * dp + minus * term.angular(&neg_theta, &neg_omega) * dm;
                    }
                    out[k] *= scale;
                    falling *= -eps - k as f64;
                    ik *= Complex64::new(0.0, 1.0);
                }
                out
            }
        }
    }

    /// Transform target suited to the source. Quadrature-backed data only
    /// carries a few accurate derivatives, so the transform tail beyond the
    /// cutoff cannot be summed below ~1e-9 relative without pushing the
    /// cutoff (and the per-evaluation rule size) up by orders of magnitude.
    pub fn transform_options(&self) -> TransformOptions {
        match *self.source {
            Source::Amplitude(_) => TransformOptions::relative(1e-8),
            _ => TransformOptions::default(),
        }
    }

    /// Highest p-derivative handed to the transforms. Quadrature-backed
    /// derivatives weight the nodes by `r^k`, so high orders lose all
    /// relative accuracy at large |p|; closed forms have no such limit.
    fn derivative_order(&self) -> usize {
        match *self.source {
            Source::Amplitude(_) => AMPLITUDE_DERIVATIVE_ORDER,
            _ => ANALYTIC_ORDER,
        }
    }

    /// The section `p ↦ f(θ, ω, p)`.
    pub fn profile_of(&self, theta: &[f64], omega: &[f64]) -> ProfileFunction {
        let me = self.clone();
        let me2 = self.clone();
        let (t1, o1) = (theta.to_vec(), omega.to_vec());
        let (t2, o2) = (theta.to_vec(), omega.to_vec());
        ProfileFunction::with_derivatives(
            move |p| me.eval(&t1, &o1, p),
            move |p, order| me2.derivatives(&t2, &o2, p, order),
            self.epsilon,
            self.derivative_order(),
            format!("{} at θ={:?}, ω={:?}", self.description, theta, omega),
        )
    }

    /// CSV samples: θ components, ω components, p, re, im.
    pub fn sample_table(&self, pairs: &[(Vec<f64>, Vec<f64>)], p_values: &[f64]) -> Table {
        let mut columns = coordinate_columns("theta", self.d);
        columns.extend(coordinate_columns("omega", self.n));
        columns.extend(["p".to_string(), "re".to_string(), "im".to_string()]);
        let mut table = Table::new(columns);
        for (theta, omega) in pairs {
            for &p in p_values {
                let v = self.eval(theta, omega, p);
                let mut row: Vec<f64> = theta.iter().chain(omega.iter()).copied().collect();
                row.extend([p, v.re, v.im]);
                table.push(row);
            }
        }
        table
    }
}

/// `A(ζ, σ, r) = f̌(ζ, σ, r) c^{-1} e^{iπ(d-n)/4} r^{N/2-1}`.
pub fn scattering_to_amplitude(f: &ScatteringData, zeta: &[f64], sigma: &[f64], r: f64) -> Result<Complex64> {
    scattering_to_amplitude_with(f, zeta, sigma, r, &f.transform_options())
}

pub fn scattering_to_amplitude_with(
    f: &ScatteringData,
    zeta: &[f64],
    sigma: &[f64],
    r: f64,
    opts: &TransformOptions,
) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("amplitude recovery needs r > 0, got {r}")));
    }
    let n_total = f.total_dim();
    let check = inverse_fourier_profile_with(&f.profile_of(zeta, sigma), r, opts)?.value;
    let (_, minus) = branch_phases(f.d(), f.n());
    Ok(check * minus * r.powf(n_total as f64 / 2.0 - 1.0) / normalization(n_total))
}

/// All (θ, ω) node pairs of a sphere-rule product.
pub fn node_pairs(sphere_d: &SphereRule, sphere_n: &SphereRule) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::with_capacity(sphere_d.len() * sphere_n.len());
    for z in sphere_d.nodes() {
        for s in sphere_n.nodes() {
            out.push((z.to_vec(), s.to_vec()));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityPoint {
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub max_deviation: f64,
    pub max_relative_deviation: f64,
    pub worst_point: Option<CompatibilityPoint>,
    pub threshold: f64,
    pub evaluations: usize,
    pub pass: bool,
}

impl CompatibilityReport {
    pub fn to_check_report(&self, description: &str) -> CheckReport {
        let mut rep = CheckReport::new("compatibility", json!({ "data": description, "threshold": self.threshold }));
        rep.max_deviation = self.max_deviation;
        rep.worst_point = serde_json::to_value(&self.worst_point).unwrap_or_default();
        rep.pass = self.pass;
        rep.details = json!({ "max_relative_deviation": self.max_relative_deviation, "evaluations": self.evaluations });
        rep
    }
}

/// Samples `|f̌(-θ,-ω,r) - f̌(θ,ω,-r)(-i sgn r)^{d-n}|` over `±r_grid` and the
/// given node pairs.
pub fn check_compatibility(
    f: &ScatteringData,
    r_grid: &[f64],
    pairs: &[(Vec<f64>, Vec<f64>)],
    threshold: f64,
) -> Result<CompatibilityReport> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0)) {
        return config("compatibility grid must be non-empty with positive entries");
    }
    let opts = f.transform_options();
    let power = f.d() as i32 - f.n() as i32;
    // Every (direction, ±r) transform is computed once; antipodal pairs share them.
    type Key = (Vec<u64>, u64);
    let key = |theta: &[f64], omega: &[f64], r: f64| -> Key {
        (theta.iter().chain(omega).map(|x| (x + 0.0).to_bits()).collect(), r.to_bits())
    };
    let mut needed: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (theta, omega) in pairs {
        for &r in r_grid {
            for (t, o, rr) in [
                (negated(theta), negated(omega), r),
                (negated(theta), negated(omega), -r),
                (theta.clone(), omega.clone(), r),
                (theta.clone(), omega.clone(), -r),
            ] {
                if seen.insert(key(&t, &o, rr)) {
                    needed.push((t, o, rr));
                }
            }
        }
    }
    let values: Vec<Result<Complex64>> = needed
        .par_iter()
        .map(|(t, o, r)| Ok(inverse_fourier_profile_with(&f.profile_of(t, o), *r, &opts)?.value))
        .collect();
    let mut check = HashMap::new();
    for ((t, o, r), v) in needed.iter().zip(values) {
        check.insert(key(t, o, *r), v?);
    }
    let tasks: Vec<(usize, f64)> = (0..pairs.len())
        .flat_map(|i| r_grid.iter().flat_map(move |&r| [(i, r), (i, -r)]))
        .collect();
    let results: Vec<Result<(f64, f64)>> = tasks
        .iter()
        .map(|&(i, r)| {
            let (theta, omega) = &pairs[i];
            let lhs = check[&key(&negated(theta), &negated(omega), r)];
            let rhs_base = check[&key(theta, omega, -r)];
            let factor = Complex64::new(0.0, -r.signum()).powi(power);
            let dev = (lhs - rhs_base * factor).norm();
            Ok((dev, dev / lhs.norm().max(rhs_base.norm()).max(f64::MIN_POSITIVE)))
        })
        .collect();
    let mut report = CompatibilityReport {
        max_deviation: 0.0,
        max_relative_deviation: 0.0,
        worst_point: None,
        threshold,
        evaluations: tasks.len(),
        pass: true,
    };
    for (&(i, r), res) in tasks.iter().zip(results) {
        let (dev, rel) = res?;
        if dev > report.max_deviation || report.worst_point.is_none() {
            report.max_deviation = dev;
            report.worst_point = Some(CompatibilityPoint {
                theta: pairs[i].0.clone(),
                omega: pairs[i].1.clone(),
                r,
            });
        }
        report.max_relative_deviation = report.max_relative_deviation.max(rel);
    }
    report.pass = report.max_deviation <= threshold;
    Ok(report)
}

/// One fitted envelope constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeEntry {
    pub label: String,
    pub constant: f64,
    /// Growth indicator: ratio (profile checks) or log-log slope (amplitude checks).
    pub growth: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub check: String,
    pub checked_range: String,
    pub entries: Vec<EnvelopeEntry>,
    pub failures: Vec<String>,
    pub pass: bool,
}

impl RegularityReport {
    fn new(check: &str, checked_range: String) -> Self {
        Self {
            check: check.into(),
            checked_range,
            entries: Vec::new(),
            failures: Vec::new(),
            pass: true,
        }
    }

    fn record(&mut self, entry: EnvelopeEntry) {
        if !entry.pass {
            self.failures.push(entry.label.clone());
            self.pass = false;
        }
        self.entries.push(entry);
    }

    fn merge(&mut self, prefix: &str, other: RegularityReport) {
        for mut e in other.entries {
            e.label = format!("{prefix}{}", e.label);
            self.record(e);
        }
    }

    pub fn to_check_report(&self, parameters: serde_json::Value) -> CheckReport {
        let mut rep = CheckReport::new(self.check.clone(), parameters);
        let worst = self
            .entries
            .iter()
            .filter(|e| e.growth.is_finite())
            .max_by(|a, b| a.growth.total_cmp(&b.growth));
        rep.max_deviation = worst.map(|e| e.growth).unwrap_or(0.0);
        rep.worst_point = json!(self.failures.first().cloned().or(worst.map(|e| e.label.clone())));
        rep.pass = self.pass;
        rep.details = json!({ "checked_range": self.checked_range, "entries": self.entries, "failures": self.failures });
        rep
    }
}

const BASE_SAMPLES: [f64; 8] = [1.0, -1.0, 10.0, -10.0, 100.0, -100.0, 1000.0, -1000.0];
const EXTENDED_SAMPLES: [f64; 4] = [1e4, -1e4, 1e5, -1e5];
/// Relative size below which a sampled derivative counts as zero.
const NEGLIGIBLE_DERIVATIVE: f64 = 1e-6;
/// Allowed growth of the envelope constant from the base to the extended samples.
const ENVELOPE_GROWTH_LIMIT: f64 = 10.0;

/// Sampled decay conditions `(1+|p|)^{k+ε} |∂^k f| ≤ C_k` for `1 ≤ k ≤ max_order`,
/// vanishing at infinity and continuity.
pub fn check_profile_conditions(f: &ProfileFunction, max_order: usize) -> RegularityReport {
    let order = max_order.min(f.max_order());
    let eps = f.epsilon();
    let mut report = RegularityReport::new(
        "scattering_conditions",
        format!("k = 1..={order}, |p| <= 1e5, vanishing at |p| = 1e6"),
    );
    let envelope = |p: f64| -> Vec<f64> {
        let d = f.derivatives(p, order);
        (0..=order).map(|k| (1.0 + p.abs()).powf(k as f64 + eps) * d[k].norm()).collect()
    };
    let base: Vec<Vec<f64>> = BASE_SAMPLES.iter().map(|&p| envelope(p)).collect();
    let extended: Vec<Vec<f64>> = EXTENDED_SAMPLES.iter().map(|&p| envelope(p)).collect();
    for k in 1..=order {
        let b = base.iter().map(|v| v[k]).fold(0.0, f64::max);
        let e = extended.iter().map(|v| v[k]).fold(0.0, f64::max);
        let finite = b.is_finite() && e.is_finite();
        let growth = if e == 0.0 { 0.0 } else if b == 0.0 { f64::INFINITY } else { e / b };
        report.record(EnvelopeEntry {
            label: format!("decay k={k}"),
            constant: b.max(e),
            growth,
            pass: finite && growth <= ENVELOPE_GROWTH_LIMIT,
        });
    }
    let (mid, far) = tail_magnitudes(f);
    report.record(EnvelopeEntry {
        label: "vanishing at infinity".into(),
        constant: far,
        growth: if mid > 0.0 { far / mid } else { 0.0 },
        pass: vanishes(mid, far),
    });
    let mut jump: f64 = 0.0;
    for p in [-0.5, 0.0, 0.5] {
        let h = 1e-7;
        let scale = 1.0 + f.value(p).norm();
        jump = jump.max((f.value(p + h) - f.value(p - h)).norm() / scale);
    }
    report.record(EnvelopeEntry {
        label: "continuity".into(),
        constant: jump,
        growth: jump / 1e-4,
        pass: jump < 1e-4,
    });
    report
}

/// `max |f(±1e4)|` and `max |f(±1e6)|`.
pub(crate) fn tail_magnitudes(f: &ProfileFunction) -> (f64, f64) {
    let mid = f.value(1e4).norm().max(f.value(-1e4).norm());
    let far = f.value(1e6).norm().max(f.value(-1e6).norm());
    (mid, far)
}

/// Decay by at least half over the last two decades (or a negligible
/// magnitude). Profiles with `|f| ~ |p|^{-ε}` shrink by `100^{-ε}`.
pub(crate) fn vanishes(mid: f64, far: f64) -> bool {
    far.is_finite() && (far <= 0.5 * mid || far <= 1e-300)
}

/// [`check_profile_conditions`] on the sections of `f` at the given node pairs.
pub fn check_scattering_conditions(f: &ScatteringData, max_order: usize, pairs: &[(Vec<f64>, Vec<f64>)]) -> RegularityReport {
    let mut report = RegularityReport::new(
        "scattering_conditions",
        format!("k = 1..={max_order}, |p| <= 1e5, vanishing at |p| = 1e6, {} node pairs", pairs.len()),
    );
    let parts: Vec<RegularityReport> = pairs
        .par_iter()
        .map(|(theta, omega)| check_profile_conditions(&f.profile_of(theta, omega), max_order))
        .collect();
    for ((theta, omega), part) in pairs.iter().zip(parts) {
        report.merge(&format!("θ={theta:?} ω={omega:?}: "), part);
    }
    report
}

/// All multi-indices over `dims` coordinates with `|α| ≤ max`, as lists of coordinate indices.
fn multi_indices(dims: usize, max: u32) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    if max >= 1 {
        out.extend((0..dims).map(|i| vec![i]));
    }
    if max >= 2 {
        for i in 0..dims {
            for j in i..dims {
                out.push(vec![i, j]);
            }
        }
    }
    out
}

fn angular_derivative(a: &Amplitude, zeta: &[f64], sigma: &[f64], r: f64, alpha: &[usize]) -> Complex64 {
    let d = a.d();
    let at = |dz: &[(usize, f64)]| {
        let mut v: Vec<f64> = zeta.iter().chain(sigma.iter()).copied().collect();
        for &(i, h) in dz {
            v[i] += h;
        }
        let (z, s) = v.split_at(d);
        a.eval(&unit(z), &unit(s), r)
    };
    match alpha {
        [] => at(&[]),
        [i] => {
            let h = 1e-4;
            (at(&[(*i, h)]) - at(&[(*i, -h)])) / (2.0 * h)
        }
        [i, j] if i == j => {
            let h = 1e-2;
            (at(&[(*i, h)]) - at(&[]) * 2.0 + at(&[(*i, -h)])) / (h * h)
        }
        [i, j] => {
            let h = 1e-2;
            (at(&[(*i, h), (*j, h)]) - at(&[(*i, h), (*j, -h)]) - at(&[(*i, -h), (*j, h)]) + at(&[(*i, -h), (*j, -h)]))
                / (4.0 * h * h)
        }
        _ => unreachable!("multi-indices are limited to order 2"),
    }
}

fn radial_derivative(g: impl Fn(f64) -> Complex64, r: f64, k: usize) -> Complex64 {
    // The second difference divides by h², so it gets a wider step to keep
    // noise from angular differences out of the result.
    let h = if k >= 2 { 1e-2 * r } else { 1e-4 * r };
    match k {
        0 => g(r),
        1 => (g(r + h) - g(r - h)) / (2.0 * h),
        _ => (g(r + h) - g(r) * 2.0 + g(r - h)) / (h * h),
    }
}

/// Least-squares slope of `log y` against `log x`, skipping zero samples.
pub(crate) fn growth_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(x, v)| (x.ln(), v.ln()))
        .unzip();
    if lx.len() < 3 {
        return None;
    }
    linear_fit(&lx, &ly).map(|(s, _)| s)
}

/// Envelope fits of `|∂_r^k ∂^α A| r^{k-(N/2-2+ε)} (1+r)^ℓ` for `k ≤ max_k`,
/// `ℓ ≤ max_ell` and `|α| ≤ min(2, angular_max_order)` on a log grid.
///
/// An envelope passes when it does not grow toward either end of the grid:
/// the log-log slope against `1/r` over the first two decades and against
/// `r` over the last decade must both stay below 0.05.
pub fn check_amplitude_conditions(
    a: &Amplitude,
    max_k: usize,
    max_ell: u32,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> RegularityReport {
    let max_k = max_k.min(2);
    let alpha_max = a.angular_max_order().min(2);
    let r_top = RadialLayout::new(a.total_dim(), a.epsilon(), 1e-10, 0.0, a.tail_model())
        .map(|l| l.r_max().min(1e4))
        .unwrap_or(40.0);
    let points = 61;
    let grid: Vec<f64> = (0..points)
        .map(|i| 1e-4 * (r_top / 1e-4).powf(i as f64 / (points - 1) as f64))
        .collect();
    let small: Vec<usize> = (0..points).filter(|&i| grid[i] <= 100.0 * grid[0]).collect();
    let large: Vec<usize> = (0..points).filter(|&i| grid[i] >= r_top / 10.0).collect();
    let alphas = multi_indices(a.total_dim(), alpha_max);
    let exponent = a.radial_exponent();
    let mut report = RegularityReport::new(
        "amplitude_conditions",
        format!(
            "k <= {max_k}, ell <= {max_ell}, |alpha| <= {alpha_max}, r in [1e-4, {r_top:.1}], {} node pairs",
            pairs.len()
        ),
    );
    // samples[k][pair·alpha] = |∂^k ∂^α A| on the grid
    let samples: Vec<Vec<Vec<f64>>> = (0..=max_k)
        .map(|k| {
            pairs
                .iter()
                .flat_map(|(z, s)| alphas.iter().map(move |al| (z, s, al)))
                .collect::<Vec<_>>()
                .par_iter()
                .map(|(z, s, al)| {
                    grid.iter()
                        .map(|&r| radial_derivative(|rr| angular_derivative(a, z, s, rr, al), r, k).norm())
                        .collect()
                })
                .collect()
        })
        .collect();
    // Series that vanish identically (up to differencing noise) carry no
    // slope information; anything below this fraction of |A| r^{-exponent}
    // is treated as zero.
    let scale_free = |k: usize, series: &[f64]| -> f64 {
        grid.iter()
            .zip(series)
            .map(|(&r, &v)| v * r.powf(k as f64 - exponent))
            .fold(0.0, f64::max)
    };
    let amplitude_scale = samples[0].iter().map(|s| scale_free(0, s)).fold(0.0, f64::max);
    for k in 0..=max_k {
        for ell in 0..=max_ell {
            let mut constant: f64 = 0.0;
            let mut growth: f64 = f64::NEG_INFINITY;
            for series in &samples[k] {
                let env: Vec<f64> = grid
                    .iter()
                    .zip(series)
                    .map(|(&r, &v)| v * r.powf(k as f64 - exponent) * (1.0 + r).powi(ell as i32))
                    .collect();
                constant = constant.max(env.iter().copied().fold(0.0, f64::max));
                if scale_free(k, series) <= NEGLIGIBLE_DERIVATIVE * amplitude_scale {
                    continue;
                }
                let xs: Vec<f64> = small.iter().map(|&i| 1.0 / grid[i]).collect();
                let ys: Vec<f64> = small.iter().map(|&i| env[i]).collect();
                if let Some(s) = growth_slope(&xs, &ys) {
                    growth = growth.max(s);
                }
                let xl: Vec<f64> = large.iter().map(|&i| grid[i]).collect();
                let yl: Vec<f64> = large.iter().map(|&i| env[i]).collect();
                if let Some(s) = growth_slope(&xl, &yl) {
                    growth = growth.max(s);
                }
            }
            let growth = if growth == f64::NEG_INFINITY { 0.0 } else { growth };
            report.record(EnvelopeEntry {
                label: format!("k={k} ell={ell}"),
                constant,
                growth,
                pass: constant.is_finite() && growth <= 0.05,
            });
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripEntry {
    /// r for A → f → A, p for f → A → f.
    pub at: f64,
    #[serde(serialize_with = "complex_pair")]
    pub expected: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub recovered: Complex64,
    pub relative_error: f64,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn entry(at: f64, expected: Complex64, recovered: Complex64) -> RoundTripEntry {
    RoundTripEntry {
        at,
        expected,
        recovered,
        relative_error: (recovered - expected).norm() / expected.norm().max(f64::MIN_POSITIVE),
    }
}

/// `A → f → A` at `(θ, ω)` and the given radii.
pub fn roundtrip_amplitude(a: &Amplitude, theta: &[f64], omega: &[f64], radii: &[f64]) -> Result<Vec<RoundTripEntry>> {
    let f = ScatteringData::from_amplitude(a)?;
    let opts = f.transform_options();
    radii
        .par_iter()
        .map(|&r| {
            let rec = scattering_to_amplitude_with(&f, theta, omega, r, &opts)?;
            Ok(entry(r, a.eval(theta, omega, r), rec))
        })
        .collect()
}

/// `f → A → f` at `(θ, ω)`: A is recovered at every node of a radial rule
/// (for both `(θ, ω)` and `(-θ, -ω)`) and transformed back.
pub fn roundtrip_scattering(f: &ScatteringData, theta: &[f64], omega: &[f64], p_values: &[f64]) -> Result<Vec<RoundTripEntry>> {
    let n_total = f.total_dim();
    let p_max = p_values.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let rule = RadialRule::new(n_total, f.epsilon(), 1e-13, p_max / 2.0)?;
    let opts = TransformOptions::relative(1e-11);
    let neg_theta = negated(theta);
    let neg_omega = negated(omega);
    let recovered: Vec<Result<(Complex64, Complex64)>> = rule
        .nodes()
        .par_iter()
        .map(|&r| {
            Ok((
                scattering_to_amplitude_with(f, theta, omega, r, &opts)?,
                scattering_to_amplitude_with(f, &neg_theta, &neg_omega, r, &opts)?,
            ))
        })
        .collect();
    let recovered: Vec<(Complex64, Complex64)> = recovered.into_iter().collect::<Result<_>>()?;
    let c = normalization(n_total);
    let (plus, minus) = branch_phases(f.d(), f.n());
    Ok(p_values
        .iter()
        .map(|&p| {
            let terms: Vec<Complex64> = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .zip(&recovered)
                .map(|((&r, &w), (ap, am))| {
                    let e = Complex64::from_polar(1.0, -r * p);
                    (e * plus * ap + e.conj() * minus * am) * (w * r.powf(1.0 - n_total as f64 / 2.0))
                })
                .collect();
            entry(p, f.eval(theta, omega, p), quad::pairwise_sum(&terms) * c)
        })
        .collect())
}
