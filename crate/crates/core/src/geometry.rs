//! Quadrature rules for the unit spheres S^{d-1}, d ∈ {1, 2, 3}, and for the
//! half-line radial integral with an algebraic singularity at the origin.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{config, Error, Result};
use crate::quad::gauss_legendre;

/// Node/weight set on S^{d-1}.
///
/// Rules are antipodally closed: [`SphereRule::antipode`] maps every node
/// index to the index holding its exact negation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereRule {
    dim: usize,
    resolution: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    antipodes: Vec<usize>,
}

/// Surface measure of S^{d-1}.
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

impl SphereRule {
    /// Builds the rule for S^{d-1}.
    ///
    /// * d = 1: the two points ±1 with unit weights (`resolution` ignored).
    /// * d = 2: `resolution` equispaced angles (must be even).
    /// * d = 3: `resolution` Gauss-Legendre polar nodes times
    ///   `2 * resolution` equispaced azimuths.
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self {
                dim,
                resolution,
                nodes: vec![1.0, -1.0],
                weights: vec![1.0, 1.0],
                antipodes: vec![1, 0],
            }),
            2 => {
                if resolution < 2 || resolution % 2 != 0 {
                    return config(format!(
                        "circle rule needs an even resolution >= 2, got {resolution}"
                    ));
                }
                let circle = circle_points(resolution);
                let w = 2.0 * PI / resolution as f64;
                let half = resolution / 2;
                Ok(Self {
                    dim,
                    resolution,
                    nodes: circle.iter().flat_map(|&(c, s)| [c, s]).collect(),
                    weights: vec![w; resolution],
                    antipodes: (0..resolution).map(|i| (i + half) % resolution).collect(),
                })
            }
            3 => {
                if resolution < 2 {
                    return config(format!(
                        "sphere rule needs resolution >= 2 polar nodes, got {resolution}"
                    ));
                }
                let (x, wx) = gauss_legendre(resolution);
                let azimuths = 2 * resolution;
                let circle = circle_points(azimuths);
                let wphi = 2.0 * PI / azimuths as f64;
                let mut nodes = Vec::with_capacity(3 * resolution * azimuths);
                let mut weights = Vec::with_capacity(resolution * azimuths);
                let mut antipodes = Vec::with_capacity(resolution * azimuths);
                for i in 0..resolution {
                    let sin_polar = (1.0 - x[i] * x[i]).max(0.0).sqrt();
                    let mirror = resolution - 1 - i;
                    for (k, &(c, s)) in circle.iter().enumerate() {
                        nodes.extend_from_slice(&[sin_polar * c, sin_polar * s, x[i]]);
                        weights.push(wx[i] * wphi);
                        antipodes.push(mirror * azimuths + (k + resolution) % azimuths);
                    }
                }
                Ok(Self {
                    dim,
                    resolution,
                    nodes,
                    weights,
                    antipodes,
                })
            }
            other => Err(Error::Dimension(other)),
        }
    }

    /// Rule fine enough for integrands oscillating like `e^{i κ <x, ζ>}`
    /// with `κ |x| <= kappa`, at least `min_resolution`.
    pub fn for_oscillation(dim: usize, kappa: f64, min_resolution: usize) -> Result<Self> {
        let kappa = kappa.max(0.0);
        let resolution = match dim {
            1 => 2,
            2 => {
                let m = (1.15 * kappa + 4.0 * kappa.cbrt() + 24.0).ceil() as usize;
                let m = m.max(min_resolution);
                m + m % 2
            }
            3 => {
                let m = (0.6 * kappa + 2.0 * kappa.cbrt() + 12.0).ceil() as usize;
                m.max(min_resolution)
            }
            other => return Err(Error::Dimension(other)),
        };
        Self::new(dim, resolution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node `-node(i)`.
    pub fn antipode(&self, i: usize) -> usize {
        self.antipodes[i]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    /// CSV dump: one row per node, coordinates then weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dim).map(|j| format!("x{j}")).collect();
        let _ = writeln!(out, "{},weight", header.join(","));
        for (i, node) in self.nodes().enumerate() {
            let coords: Vec<String> = node.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{},{:e}", coords.join(","), self.weights[i]);
        }
        out
    }
}

/// `count` equispaced points on the unit circle; the second half is the
/// exact negation of the first.
fn circle_points(count: usize) -> Vec<(f64, f64)> {
    let half = count / 2;
    let first: Vec<(f64, f64)> = (0..half)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / count as f64;
            (phi.cos(), phi.sin())
        })
        .collect();
    first
        .iter()
        .copied()
        .chain(first.iter().map(|&(c, s)| (-c, -s)))
        .collect()
}

/// How fast the radial integrands decay; fixes the truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailModel {
    /// `r^a e^{-r}` tails.
    Exponential,
    /// `r^a (1 + r)^{-ℓ₀}` tails.
    Algebraic(u32),
}

pub const RADIAL_PANEL_NODES: usize = 16;

/// Panel structure of a [`RadialRule`], generated on demand so very fine
/// rules can be streamed instead of stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialLayout {
    gx: Vec<f64>,
    gw: Vec<f64>,
    first: f64,
    panel: f64,
    uniform: usize,
    sub: usize,
    kappa: u32,
    r_max: f64,
    singularity_exponent: f64,
}

impl RadialLayout {
    pub fn new(total_dim: usize, epsilon: f64, tol: f64, s_scale: f64, tail: TailModel) -> Result<Self> {
        if total_dim < 2 {
            return config(format!("total dimension must be >= 2, got {total_dim}"));
        }
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return config(format!("epsilon must lie in (0, 1/2], got {epsilon}"));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return config(format!("radial tolerance must lie in (0, 1), got {tol}"));
        }
        if !(s_scale >= 0.0 && s_scale.is_finite()) {
            return config(format!("s_scale must be finite and >= 0, got {s_scale}"));
        }
        let a = total_dim as f64 / 2.0 - 2.0 + epsilon;
        let log_tol = -tol.ln();
        let r_max = match tail {
            TailModel::Exponential => log_tol + 10.0 + a.max(0.0) * (log_tol + 10.0).ln(),
            TailModel::Algebraic(order) => {
                let decay = order as f64 - a;
                if decay <= 1.0 {
                    return config(format!("tail order {order} is not integrable against r^{a}"));
                }
                let r = tol.powf(-1.0 / decay);
                if r > 1e7 {
                    return config(format!(
                        "tail order {order} needs truncation at r = {r:e}; raise the order or the tolerance"
                    ));
                }
                r
            }
        };
        let kappa = (4.0 / epsilon).ceil() as u32;
        let panel = 2.0 * PI / (s_scale + 1.0);
        let first = panel.min(r_max);
        let uniform = ((r_max - first) / panel).ceil().max(0.0) as usize;
        let (gx, gw) = gauss_legendre(RADIAL_PANEL_NODES);
        Ok(Self {
            gx,
            gw,
            first,
            panel,
            uniform,
            sub: ((0.8 * kappa as f64).ceil() as usize).max(4),
            kappa,
            r_max: first + uniform as f64 * panel,
            singularity_exponent: a,
        })
    }

    pub fn panel_count(&self) -> usize {
        self.sub + self.uniform
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Nodes and weights of panel `i`, in increasing order of r.
    pub fn panel(&self, i: usize) -> ([f64; RADIAL_PANEL_NODES], [f64; RADIAL_PANEL_NODES]) {
        let mut x = [0.0; RADIAL_PANEL_NODES];
        let mut w = [0.0; RADIAL_PANEL_NODES];
        if i < self.sub {
            // r = first * u^κ removes the r^a singularity on the first panel.
            let du = 1.0 / self.sub as f64;
            let u0 = i as f64 * du;
            let k = self.kappa as i32;
            for q in 0..RADIAL_PANEL_NODES {
                let u = u0 + 0.5 * du * (self.gx[q] + 1.0);
                x[q] = self.first * u.powi(k);
                w[q] = 0.5 * du * self.gw[q] * self.first * self.kappa as f64 * u.powi(k - 1);
            }
        } else {
            let a0 = self.first + (i - self.sub) as f64 * self.panel;
            for q in 0..RADIAL_PANEL_NODES {
                x[q] = a0 + 0.5 * self.panel * (self.gx[q] + 1.0);
                w[q] = 0.5 * self.panel * self.gw[q];
            }
        }
        (x, w)
    }
}

/// Quadrature on (0, r_max] for integrands `r^a g(r) e^{±i r p}` with
/// `a >= -1 + ε`, `g` smooth and `|p| <= 2 * s_scale`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    singularity_exponent: f64,
    epsilon: f64,
    s_scale: f64,
    tol: f64,
    kappa: u32,
}

impl RadialRule {
    /// Rule for total dimension `total_dim = d + n` with exponential tails.
    pub fn new(total_dim: usize, epsilon: f64, tol: f64, s_scale: f64) -> Result<Self> {
        Self::with_tail(total_dim, epsilon, tol, s_scale, TailModel::Exponential)
    }

    pub fn with_tail(
        total_dim: usize,
        epsilon: f64,
        tol: f64,
        s_scale: f64,
        tail: TailModel,
    ) -> Result<Self> {
        let layout = RadialLayout::new(total_dim, epsilon, tol, s_scale, tail)?;
        let mut nodes = Vec::with_capacity(layout.panel_count() * RADIAL_PANEL_NODES);
        let mut weights = Vec::with_capacity(layout.panel_count() * RADIAL_PANEL_NODES);
        for i in 0..layout.panel_count() {
            let (x, w) = layout.panel(i);
            nodes.extend_from_slice(&x);
            weights.extend_from_slice(&w);
        }
        Ok(Self {
            nodes,
            weights,
            r_max: layout.r_max,
            singularity_exponent: layout.singularity_exponent,
            epsilon,
            s_scale,
            tol,
            kappa: layout.kappa,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn singularity_exponent(&self) -> f64 {
        self.singularity_exponent
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn s_scale(&self) -> f64 {
        self.s_scale
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// Largest gap between consecutive nodes, including the gaps to 0 and r_max.
    pub fn max_spacing(&self) -> f64 {
        let mut gap = self.nodes[0];
        for w in self.nodes.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap.max(self.r_max - self.nodes[self.nodes.len() - 1])
    }

    /// Relative error of the rule on `∫_0^∞ r^a e^{-r} dr = Γ(a + 1)`.
    pub fn gamma_self_test(&self, a: f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * r.powf(a) * (-r).exp())
            .collect();
        let approx = crate::quad::pairwise_sum_real(&terms);
        let exact = statrs::function::gamma::gamma(a + 1.0);
        ((approx - exact) / exact).abs()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,weight\n");
        for (r, w) in self.nodes.iter().zip(&self.weights) {
            let _ = writeln!(out, "{r:e},{w:e}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_sphere_is_two_points() {
        let rule = SphereRule::new(1, 7).unwrap();
        assert_eq!(rule.len(), 2);
        assert_eq!(rule.node(0), &[1.0]);
        assert_eq!(rule.node(1), &[-1.0]);
        assert_eq!(rule.weights(), &[1.0, 1.0]);
    }

    #[test]
    fn circle_rule_has_trapezoid_weights() {
        let rule = SphereRule::new(2, 8).unwrap();
        assert_eq!(rule.len(), 8);
        for i in 0..8 {
            assert!((rule.weight(i) - PI / 4.0).abs() < 1e-15);
        }
        let sum: f64 = rule.weights().iter().sum();
        assert!((sum - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn weight_sums_and_unit_nodes() {
        for (dim, res) in [(1, 1), (2, 2), (2, 64), (3, 2), (3, 9), (3, 40)] {
            let rule = SphereRule::new(dim, res).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - sphere_measure(dim)).abs() < 1e-12, "dim {dim} res {res}");
            for node in rule.nodes() {
                let norm: f64 = node.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-14);
            }
            assert!(rule.weights().iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn antipodes_are_exact_negations() {
        for (dim, res) in [(1, 1), (2, 10), (3, 7), (3, 8)] {
            let rule = SphereRule::new(dim, res).unwrap();
            for i in 0..rule.len() {
                let j = rule.antipode(i);
                for (a, b) in rule.node(i).iter().zip(rule.node(j)) {
                    assert!(*a == -*b, "dim {dim} node {i}");
                }
                assert_eq!(rule.weight(i).to_bits(), rule.weight(j).to_bits());
            }
        }
    }

    #[test]
    fn rejects_bad_configurations() {
        assert_eq!(SphereRule::new(4, 8), Err(Error::Dimension(4)));
        assert!(matches!(SphereRule::new(2, 7), Err(Error::Configuration(_))));
        assert!(matches!(SphereRule::new(3, 1), Err(Error::Configuration(_))));
        assert!(matches!(RadialRule::new(2, 0.0, 1e-10, 0.0), Err(Error::Configuration(_))));
        assert!(matches!(RadialRule::new(2, 0.6, 1e-10, 0.0), Err(Error::Configuration(_))));
        assert!(matches!(RadialRule::new(2, 0.5, 0.0, 0.0), Err(Error::Configuration(_))));
    }

    fn circle_average(rule: &SphereRule, x: [f64; 2]) -> Complex64 {
        (0..rule.len())
            .map(|i| {
                let z = rule.node(i);
                Complex64::new(0.0, x[0] * z[0] + x[1] * z[1]).exp() * rule.weight(i)
            })
            .sum()
    }

    // 2π J0(|x|) by adaptive quadrature of ∫_0^{2π} cos(|x| cos φ) dφ.
    fn circle_oracle(radius: f64) -> f64 {
        crate::quad::integrate(
            |phi| Complex64::new((radius * phi.cos()).cos(), 0.0),
            0.0,
            2.0 * PI,
            &crate::quad::Tolerance::absolute(1e-14),
        )
        .unwrap()
        .value
        .re
    }

    #[test]
    fn circle_rule_reproduces_bessel_integral() {
        let rule = SphereRule::new(2, 32).unwrap();
        let exact = circle_oracle(3.0);
        assert!((exact + 1.6339).abs() < 1e-4);
        let approx = circle_average(&rule, [3.0 / 2f64.sqrt(), 3.0 / 2f64.sqrt()]);
        assert!((approx.re - exact).abs() < 1e-10);
        assert!(approx.im.abs() < 1e-10);
    }

    #[test]
    fn circle_rule_converges_geometrically() {
        let exact = circle_oracle(1.0);
        let e16 = (circle_average(&SphereRule::new(2, 16).unwrap(), [0.6, 0.8]).re - exact).abs();
        let e32 = (circle_average(&SphereRule::new(2, 32).unwrap(), [0.6, 0.8]).re - exact).abs();
        assert!(e16 < 1e-12 && e32 <= e16 / 10.0 || e16 < 1e-14, "e16 {e16} e32 {e32}");
    }

    #[test]
    fn sphere_rule_integrates_plane_wave() {
        // ∫_{S^2} e^{i<x,ζ>} dζ = 4π sin|x| / |x|.
        let rule = SphereRule::new(3, 24).unwrap();
        let x = [0.5f64, -1.0, 2.0];
        let rad = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let approx: Complex64 = (0..rule.len())
            .map(|i| {
                let z = rule.node(i);
                Complex64::new(0.0, x[0] * z[0] + x[1] * z[1] + x[2] * z[2]).exp() * rule.weight(i)
            })
            .sum();
        assert!((approx.re - 4.0 * PI * rad.sin() / rad).abs() < 1e-12);
        assert!(approx.im.abs() < 1e-12);
    }

    #[test]
    fn radial_rule_matches_gamma_function() {
        let rule = RadialRule::new(2, 0.5, 1e-10, 0.0).unwrap();
        for a in [-0.5, 0.0, 0.5, 1.0] {
            assert!(rule.gamma_self_test(a) < 1e-10, "a = {a}: {}", rule.gamma_self_test(a));
        }
        let sum: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(r, w)| w * r.powf(-0.5) * (-r).exp())
            .sum();
        assert!((sum - PI.sqrt()).abs() < 1e-10);
        let rule4 = RadialRule::new(4, 0.5, 1e-10, 0.0).unwrap();
        let sum4: f64 = rule4
            .nodes()
            .iter()
            .zip(rule4.weights())
            .map(|(r, w)| w * r.sqrt() * (-r).exp())
            .sum();
        assert!((sum4 - 0.886_226_925_452_758).abs() < 1e-10);
    }

    #[test]
    fn radial_rule_resolves_oscillation() {
        // Re[Γ(1/2) (1 - 64 i)^{-1/2}].
        let rule = RadialRule::new(2, 0.5, 1e-10, 32.0).unwrap();
        let sum: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(r, w)| w * r.powf(-0.5) * (-r).exp() * (64.0 * r).cos())
            .sum();
        let exact = (PI.sqrt() * Complex64::new(1.0, -64.0).powf(-0.5)).re;
        assert!((sum - exact).abs() < 1e-8, "{sum} vs {exact}");
    }

    #[test]
    fn radial_rule_structure() {
        for (eps, s) in [(0.5, 0.0), (0.5, 40.0), (0.25, 7.0), (0.1, 3.0)] {
            let rule = RadialRule::new(3, eps, 1e-10, s).unwrap();
            assert!(rule.nodes().windows(2).all(|w| w[1] > w[0]));
            assert!(rule.nodes()[0] > 0.0);
            assert!(*rule.nodes().last().unwrap() <= rule.r_max());
            assert!(rule.max_spacing() <= PI / (4.0 * (s + 1.0)), "eps {eps} s {s}");
            assert!(rule.weights().iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn algebraic_tail_truncation() {
        let rule = RadialRule::with_tail(2, 0.5, 1e-6, 0.0, TailModel::Algebraic(8)).unwrap();
        let a = rule.singularity_exponent();
        let r = rule.r_max();
        assert!(r.powf(a) * (1.0 + r).powi(-8) < 1e-6);
        assert!(RadialRule::with_tail(2, 0.5, 1e-6, 0.0, TailModel::Algebraic(0)).is_err());
    }
}
