//! Solution fields `u(x, y) = (2π)^{-N} ∫_0^∞ ∫∫ e^{ir(<x,ζ> - <y,σ>)} A(ζ, σ, r) dζ dσ dr`,
//! finite-difference residuals of `(Δ_y - Δ_x) u`, and large-s slices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{config, Result};
use crate::fit::{linear_fit, log_log_slope};
use crate::geometry::{RadialRule, SphereRule};
use crate::quad::pairwise_sum;
use crate::report::Table;
use crate::scattering::Amplitude;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Default radial truncation tolerance.
pub const FIELD_TOL: f64 = 1e-12;
const MAX_TABLE_ENTRIES: usize = 50_000_000;

/// Errors below this are treated as exact agreement when fitting rates.
pub const DEGENERATE_ERROR: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct SolutionField {
    amplitude: Amplitude,
    sphere_d: SphereRule,
    sphere_n: SphereRule,
    radial: RadialRule,
    /// Per term: `w_ζ w_σ P(ζ, σ)`, row-major in (ζ, σ).
    angular: Vec<Vec<Complex64>>,
    /// Per term: `w_r R(r)`.
    radial_weights: Vec<Vec<Complex64>>,
}

impl SolutionField {
    /// Field whose rules resolve every evaluation with `max(|x|, |y|) ≤ radius`.
    pub fn new(a: &Amplitude, radius: f64) -> Result<Self> {
        Self::with_tolerance(a, radius, FIELD_TOL)
    }

    pub fn with_tolerance(a: &Amplitude, radius: f64, tol: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return config(format!("field radius must be positive, got {radius}"));
        }
        let radial = RadialRule::with_tail(a.total_dim(), a.epsilon(), tol, radius, a.tail_model())?;
        let kappa = radial.r_max() * radius;
        let sphere_d = SphereRule::for_oscillation(a.d(), kappa, 2)?;
        let sphere_n = SphereRule::for_oscillation(a.n(), kappa, 2)?;
        Self::from_rules(a, sphere_d, sphere_n, radial)
    }

    pub fn from_rules(a: &Amplitude, sphere_d: SphereRule, sphere_n: SphereRule, radial: RadialRule) -> Result<Self> {
        if sphere_d.dim() != a.d() || sphere_n.dim() != a.n() {
            return config(format!(
                "sphere rules of dimension ({}, {}) do not match (d, n) = ({}, {})",
                sphere_d.dim(),
                sphere_n.dim(),
                a.d(),
                a.n()
            ));
        }
        if (radial.singularity_exponent() - a.radial_exponent()).abs() > 1e-12 {
            return config(format!(
                "radial rule exponent {} does not match the amplitude exponent {}",
                radial.singularity_exponent(),
                a.radial_exponent()
            ));
        }
        let entries = sphere_d.len() * sphere_n.len() * a.terms().len().max(1);
        if entries > MAX_TABLE_ENTRIES {
            return config(format!("angular table of {entries} entries exceeds the limit of {MAX_TABLE_ENTRIES}"));
        }
        let angular = a
            .terms()
            .iter()
            .map(|t| {
                let mut table = Vec::with_capacity(sphere_d.len() * sphere_n.len());
                for (i, z) in sphere_d.nodes().enumerate() {
                    for (j, s) in sphere_n.nodes().enumerate() {
                        table.push(t.angular(z, s) * (sphere_d.weight(i) * sphere_n.weight(j)));
                    }
                }
                table
            })
            .collect();
        let radial_weights = a
            .terms()
            .iter()
            .map(|t| radial.nodes().iter().zip(radial.weights()).map(|(&r, &w)| t.radial(r) * w).collect())
            .collect();
        Ok(Self {
            amplitude: a.clone(),
            sphere_d,
            sphere_n,
            radial,
            angular,
            radial_weights,
        })
    }

    /// Same field with doubled sphere resolution and doubled radial panel count.
    pub fn refined(&self) -> Result<Self> {
        let a = &self.amplitude;
        let radial = RadialRule::with_tail(
            a.total_dim(),
            a.epsilon(),
            self.radial.tol(),
            2.0 * self.radial.s_scale() + 1.0,
            a.tail_model(),
        )?;
        let sphere_d = SphereRule::new(a.d(), if a.d() == 1 { 2 } else { 2 * self.sphere_d.resolution() })?;
        let sphere_n = SphereRule::new(a.n(), if a.n() == 1 { 2 } else { 2 * self.sphere_n.resolution() })?;
        Self::from_rules(a, sphere_d, sphere_n, radial)
    }

    pub fn amplitude(&self) -> &Amplitude {
        &self.amplitude
    }

    pub fn sphere_d(&self) -> &SphereRule {
        &self.sphere_d
    }

    pub fn sphere_n(&self) -> &SphereRule {
        &self.sphere_n
    }

    pub fn radial(&self) -> &RadialRule {
        &self.radial
    }

    pub fn radius(&self) -> f64 {
        self.radial.s_scale()
    }

    pub fn d(&self) -> usize {
        self.amplitude.d()
    }

    pub fn n(&self) -> usize {
        self.amplitude.n()
    }

    fn check_point(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.d() || y.len() != self.n() {
            return config(format!(
                "point has ({}, {}) components, field has (d, n) = ({}, {})",
                x.len(),
                y.len(),
                self.d(),
                self.n()
            ));
        }
        let reach = norm(x).max(norm(y));
        if !reach.is_finite() || reach > self.radius() * (1.0 + 1e-12) {
            return config(format!(
                "evaluation radius {reach} exceeds the field radius {}; rebuild the field for a larger radius",
                self.radius()
            ));
        }
        Ok(())
    }

    /// `u(x, y)`.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<Complex64> {
        self.check_point(x, y)?;
        let px: Vec<f64> = self.sphere_d.nodes().map(|z| dot(x, z)).collect();
        let py: Vec<f64> = self.sphere_n.nodes().map(|s| dot(y, s)).collect();
        let ns = py.len();
        let per_node: Vec<Complex64> = self
            .radial
            .nodes()
            .par_iter()
            .enumerate()
            .map(|(k, &r)| {
                let ey: Vec<Complex64> = py.iter().map(|&v| Complex64::from_polar(1.0, -r * v)).collect();
                let mut total = ZERO;
                for (table, rw) in self.angular.iter().zip(&self.radial_weights) {
                    let mut acc = ZERO;
                    for (i, &v) in px.iter().enumerate() {
                        let row = &table[i * ns..(i + 1) * ns];
                        let inner: Complex64 = row.iter().zip(&ey).map(|(a, b)| a * b).sum();
                        acc += Complex64::from_polar(1.0, r * v) * inner;
                    }
                    total += acc * rw[k];
                }
                total
            })
            .collect();
        Ok(pairwise_sum(&per_node) * (2.0 * PI).powi(-(self.amplitude.total_dim() as i32)))
    }

    /// Central-difference `(Δ_y - Δ_x) u` at `(x, y)` from `2(d+n)+1` evaluations.
    pub fn pde_residual(&self, x: &[f64], y: &[f64], h: f64) -> Result<Complex64> {
        Ok(self.residual_parts(x, y, h)?.0)
    }

    /// Residual together with the largest |u| on the stencil.
    fn residual_parts(&self, x: &[f64], y: &[f64], h: f64) -> Result<(Complex64, f64)> {
        if !(h > 0.0) {
            return config(format!("stencil step must be positive, got {h}"));
        }
        let centre = self.evaluate(x, y)?;
        let mut scale = centre.norm();
        let mut second = |v: &[f64], is_x: bool| -> Result<Complex64> {
            let mut sum = ZERO;
            for i in 0..v.len() {
                let mut plus = v.to_vec();
                let mut minus = v.to_vec();
                plus[i] += h;
                minus[i] -= h;
                let (a, b) = if is_x {
                    (self.evaluate(&plus, y)?, self.evaluate(&minus, y)?)
                } else {
                    (self.evaluate(x, &plus)?, self.evaluate(x, &minus)?)
                };
                scale = scale.max(a.norm()).max(b.norm());
                sum += a + b - centre * 2.0;
            }
            Ok(sum / (h * h))
        };
        let lap_y = second(y, false)?;
        let lap_x = second(x, true)?;
        Ok((lap_y - lap_x, scale))
    }

    /// Residuals over an h ladder with the fitted order above the roundoff floor.
    pub fn residual_ladder(&self, x: &[f64], y: &[f64], steps: &[f64]) -> Result<ResidualLadder> {
        let u = self.evaluate(x, y)?;
        let mut residuals = Vec::with_capacity(steps.len());
        let mut floors = Vec::with_capacity(steps.len());
        for &h in steps {
            let (res, scale) = self.residual_parts(x, y, h)?;
            residuals.push(res.norm());
            // Roundoff in 4(d+n) stencil values divided by h².
            floors.push(64.0 * f64::EPSILON * scale * (4 * (self.d() + self.n())) as f64 / (h * h));
        }
        let above: Vec<usize> = (0..steps.len()).filter(|&i| residuals[i] > 10.0 * floors[i]).collect();
        let order = if above.len() >= 2 {
            let hx: Vec<f64> = above.iter().map(|&i| steps[i]).collect();
            let rv: Vec<f64> = above.iter().map(|&i| residuals[i]).collect();
            log_log_slope(&hx, &rv)
        } else {
            None
        };
        Ok(ResidualLadder {
            x: x.to_vec(),
            y: y.to_vec(),
            u,
            steps: steps.to_vec(),
            residuals,
            floors,
            order,
        })
    }

    /// `s^{N/2-1} u(sθ, (s+p)ω)` along the given s values.
    pub fn asymptotic_slice(&self, theta: &[f64], omega: &[f64], p: f64, s_values: &[f64]) -> Result<AsymptoticSlice> {
        if s_values.windows(2).any(|w| !(w[1] > w[0])) || s_values.iter().any(|s| !(*s > 0.0)) {
            return config("s values must be positive and strictly increasing");
        }
        let power = self.amplitude.total_dim() as f64 / 2.0 - 1.0;
        let scaled_values = s_values
            .iter()
            .map(|&s| {
                let x: Vec<f64> = theta.iter().map(|t| s * t).collect();
                let y: Vec<f64> = omega.iter().map(|o| (s + p) * o).collect();
                Ok(self.evaluate(&x, &y)? * s.powf(power))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AsymptoticSlice {
            theta: theta.to_vec(),
            omega: omega.to_vec(),
            p,
            s_values: s_values.to_vec(),
            scaled_values,
        })
    }

    /// Slice plus rate fit; needs at least four s values.
    pub fn extract_scattering(
        &self,
        theta: &[f64],
        omega: &[f64],
        p: f64,
        s_values: &[f64],
        f_ref: Option<Complex64>,
    ) -> Result<(AsymptoticSlice, Extraction)> {
        if s_values.len() < 4 {
            return config("rate extraction needs at least four s values");
        }
        let slice = self.asymptotic_slice(theta, omega, p, s_values)?;
        let ext = slice.extract(f_ref);
        Ok((slice, ext))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Geometric ladder `start, 2·start, …` with `count` entries.
pub fn geometric_ladder(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * 2f64.powi(i as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualLadder {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(serialize_with = "complex_pair")]
    pub u: Complex64,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    pub floors: Vec<f64>,
    /// Fitted order over the steps whose residual is above 10× the floor.
    pub order: Option<f64>,
}

impl ResidualLadder {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["h", "residual", "floor", "relative_residual"]);
        for i in 0..self.steps.len() {
            t.push(vec![self.steps[i], self.residuals[i], self.floors[i], self.residuals[i] / self.u.norm()]);
        }
        t.with_footer("fitted_order", self.order.unwrap_or(f64::NAN))
    }
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticSlice {
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub p: f64,
    pub s_values: Vec<f64>,
    #[serde(skip)]
    pub scaled_values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    #[serde(serialize_with = "complex_pair")]
    pub f_est: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub f_star: Complex64,
    pub errors: Vec<f64>,
    /// Slope of `log |scaled - f_star|` against `log s`; `-inf` when degenerate.
    pub rate: f64,
    pub degenerate: bool,
}

impl Extraction {
    pub fn endpoint_relative_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(0.0) / self.f_star.norm()
    }
}

impl AsymptoticSlice {
    pub fn extract(&self, f_ref: Option<Complex64>) -> Extraction {
        let f_est = self.scaled_values.last().copied().unwrap_or(ZERO);
        let f_star = f_ref.unwrap_or(f_est);
        let errors: Vec<f64> = self.scaled_values.iter().map(|v| (v - f_star).norm()).collect();
        let degenerate = errors.iter().all(|e| *e < DEGENERATE_ERROR);
        let rate = if degenerate {
            f64::NEG_INFINITY
        } else {
            let (lx, ly): (Vec<f64>, Vec<f64>) = self
                .s_values
                .iter()
                .zip(&errors)
                .filter(|(_, e)| **e >= DEGENERATE_ERROR)
                .map(|(s, e)| (s.ln(), e.ln()))
                .unzip();
            linear_fit(&lx, &ly).map(|(slope, _)| slope).unwrap_or(f64::NAN)
        };
        Extraction {
            f_est,
            f_star,
            errors,
            rate,
            degenerate,
        }
    }

    pub fn to_table(&self, extraction: &Extraction) -> Table {
        let mut t = Table::new(["s", "re", "im", "abs_err"]);
        for ((s, v), e) in self.s_values.iter().zip(&self.scaled_values).zip(&extraction.errors) {
            t.push(vec![*s, v.re, v.im, *e]);
        }
        t.with_footer("fitted_rate", extraction.rate)
    }
}
