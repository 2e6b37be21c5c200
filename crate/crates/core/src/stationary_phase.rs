//! The inner sphere integral `∫∫ e^{irs(<θ,ζ> - <ω,σ>)} e^{-irp<ω,σ>} A(ζ, σ, r) dζ dσ`
//! against its four-critical-point asymptotics.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{config, Result};
use crate::fit::{complex_two_term_fit, log_log_slope};
use crate::geometry::SphereRule;
use crate::quad::pairwise_sum;
use crate::report::Table;
use crate::scattering::{branch_phases, negated, Amplitude};

/// Critical points `(±θ, ±ω)` of `Q(ζ, σ) = <θ,ζ> - <ω,σ>` on the sphere product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointSet {
    /// `(θ, ω)`, `(-θ, -ω)`, `(-θ, ω)`, `(θ, -ω)`.
    pub points: [(Vec<f64>, Vec<f64>); 4],
    #[serde(skip)]
    pub phases: (Complex64, Complex64),
    /// Hessian signatures at `(θ, ω)` and `(-θ, -ω)`.
    pub signatures: (i32, i32),
}

impl CriticalPointSet {
    pub fn new(d: usize, n: usize, theta: &[f64], omega: &[f64]) -> Self {
        let (t, o) = (theta.to_vec(), omega.to_vec());
        let (nt, no) = (negated(theta), negated(omega));
        Self {
            points: [(t.clone(), o.clone()), (nt.clone(), no.clone()), (nt, o), (t, no)],
            phases: branch_phases(d, n),
            signatures: (n as i32 - d as i32, d as i32 - n as i32),
        }
    }
}

/// Smallest admissible sphere resolution for oscillation `r·s`.
pub fn minimum_resolution(r: f64, s: f64) -> usize {
    10 + 4 * (r * s).abs().ceil() as usize
}

fn sphere(dim: usize, resolution: usize) -> Result<SphereRule> {
    match dim {
        1 => SphereRule::new(1, 2),
        2 => SphereRule::new(2, resolution + resolution % 2),
        _ => SphereRule::new(dim, resolution),
    }
}

/// Direct quadrature of the inner integral on product sphere rules.
#[allow(clippy::too_many_arguments)]
pub fn inner_integral(
    a: &Amplitude,
    theta: &[f64],
    omega: &[f64],
    p: f64,
    r: f64,
    s: f64,
    resolution: usize,
) -> Result<Complex64> {
    if !(r > 0.0) {
        return config(format!("inner integral needs r > 0, got {r}"));
    }
    if theta.len() != a.d() || omega.len() != a.n() {
        return config("θ and ω must have d and n components");
    }
    let needed = minimum_resolution(r, s);
    if resolution < needed {
        return config(format!("sphere resolution {resolution} is below the oscillation budget {needed} for r·s = {}", r * s));
    }
    let sd = sphere(a.d(), resolution)?;
    let sn = sphere(a.n(), resolution)?;
    let ez: Vec<Complex64> = sd
        .nodes()
        .enumerate()
        .map(|(i, z)| Complex64::from_polar(sd.weight(i), r * s * dot(theta, z)))
        .collect();
    let es: Vec<Complex64> = sn
        .nodes()
        .enumerate()
        .map(|(j, g)| Complex64::from_polar(sn.weight(j), -r * (s + p) * dot(omega, g)))
        .collect();
    let rows: Vec<Complex64> = (0..sd.len())
        .into_par_iter()
        .map(|i| {
            let z = sd.node(i);
            let terms: Vec<Complex64> = sn.nodes().zip(&es).map(|(g, e)| e * a.eval(z, g, r)).collect();
            ez[i] * pairwise_sum(&terms)
        })
        .collect();
    Ok(pairwise_sum(&rows))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn amplitude_scale(total_dim: usize, r: f64, s: f64) -> f64 {
    (2.0 * PI / (r * s)).powf(total_dim as f64 / 2.0 - 1.0)
}

/// Contributions of the two non-oscillatory critical points `(θ, ω)` and `(-θ, -ω)`.
pub fn leading_terms(a: &Amplitude, theta: &[f64], omega: &[f64], p: f64, r: f64, s: f64) -> Complex64 {
    let (plus, minus) = branch_phases(a.d(), a.n());
    let e = Complex64::from_polar(1.0, -r * p);
    let value = plus * e * a.eval(theta, omega, r) + minus * e.conj() * a.eval(&negated(theta), &negated(omega), r);
    value * amplitude_scale(a.total_dim(), r, s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseComparison {
    pub s_values: Vec<f64>,
    #[serde(skip)]
    pub direct: Vec<Complex64>,
    #[serde(skip)]
    pub leading: Vec<Complex64>,
    /// Fitted coefficients of the `(-θ, ω)` and `(θ, -ω)` saddle contributions.
    #[serde(skip)]
    pub cross_fitted: Option<(Complex64, Complex64)>,
    pub remainders: Vec<f64>,
    pub residual_slope: f64,
    /// `-(N/2 - 1/2)`.
    pub expected_slope: f64,
    /// `d = n = 1`: the integral is a four-term sum and the scan says nothing.
    pub vacuous: bool,
}

impl PhaseComparison {
    /// `|Ĉ₁|, |Ĉ₂|` when fitted.
    pub fn cross_magnitudes(&self) -> Option<(f64, f64)> {
        self.cross_fitted.map(|(a, b)| (a.norm(), b.norm()))
    }

    /// Contract: residual slope within 0.2 of the expected order.
    pub fn pass(&self) -> bool {
        !self.vacuous && self.residual_slope <= self.expected_slope + 0.2
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["s", "re_direct", "im_direct", "re_leading", "im_leading", "abs_remainder"]);
        for i in 0..self.s_values.len() {
            t.push(vec![
                self.s_values[i],
                self.direct[i].re,
                self.direct[i].im,
                self.leading[i].re,
                self.leading[i].im,
                self.remainders[i],
            ]);
        }
        t.with_footer("residual_slope", self.residual_slope)
    }
}

/// Direct integral minus leading terms along an s ladder, with the two
/// oscillatory saddle coefficients fitted by least squares and the slope of
/// what remains.
pub fn remainder_scan(
    a: &Amplitude,
    theta: &[f64],
    omega: &[f64],
    p: f64,
    r: f64,
    s_values: &[f64],
) -> Result<PhaseComparison> {
    if s_values.len() < 5 {
        return config("remainder scan needs at least five s values");
    }
    if s_values.windows(2).any(|w| !(w[1] > w[0])) || s_values[0] <= 0.0 {
        return config("s values must be positive and strictly increasing");
    }
    let total = a.total_dim();
    let expected_slope = -(total as f64 / 2.0 - 0.5);
    let direct: Vec<Complex64> = s_values
        .iter()
        .map(|&s| inner_integral(a, theta, omega, p, r, s, minimum_resolution(r, s)))
        .collect::<Result<_>>()?;
    let leading: Vec<Complex64> = s_values.iter().map(|&s| leading_terms(a, theta, omega, p, r, s)).collect();
    let target: Vec<Complex64> = direct.iter().zip(&leading).map(|(x, y)| x - y).collect();
    if a.d() == 1 && a.n() == 1 {
        return Ok(PhaseComparison {
            s_values: s_values.to_vec(),
            direct,
            leading,
            cross_fitted: None,
            remainders: target.iter().map(|t| t.norm()).collect(),
            residual_slope: f64::NAN,
            expected_slope,
            vacuous: true,
        });
    }
    let a_cross1 = a.eval(&negated(theta), omega, r);
    let a_cross2 = a.eval(theta, &negated(omega), r);
    let basis1: Vec<Complex64> = s_values
        .iter()
        .map(|&s| Complex64::from_polar(amplitude_scale(total, r, s), -2.0 * r * s - r * p) * a_cross1)
        .collect();
    let basis2: Vec<Complex64> = s_values
        .iter()
        .map(|&s| Complex64::from_polar(amplitude_scale(total, r, s), 2.0 * r * s + r * p) * a_cross2)
        .collect();
    // Each equation is scaled by s^{N/2-1/2}, the inverse of the expected
    // remainder size, so the coarse end of the ladder (where the saddle
    // corrections are largest) does not bias the fitted constants.
    let weights: Vec<f64> = s_values.iter().map(|s| s.powf(-expected_slope)).collect();
    let weigh = |v: &[Complex64]| -> Vec<Complex64> { v.iter().zip(&weights).map(|(x, w)| x * w).collect() };
    let (wb1, wb2, wt) = (weigh(&basis1), weigh(&basis2), weigh(&target));
    let cross_fitted = match (a_cross1.norm() > 0.0, a_cross2.norm() > 0.0) {
        (true, true) => complex_two_term_fit(&wb1, &wb2, &wt),
        (true, false) => single_fit(&wb1, &wt).map(|c| (c, Complex64::new(0.0, 0.0))),
        (false, true) => single_fit(&wb2, &wt).map(|c| (Complex64::new(0.0, 0.0), c)),
        (false, false) => Some((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))),
    };
    let (c1, c2) = cross_fitted.unwrap_or_default();
    let remainders: Vec<f64> = (0..s_values.len())
        .map(|i| (target[i] - c1 * basis1[i] - c2 * basis2[i]).norm())
        .collect();
    let residual_slope = log_log_slope(s_values, &remainders).unwrap_or(f64::NAN);
    Ok(PhaseComparison {
        s_values: s_values.to_vec(),
        direct,
        leading,
        cross_fitted,
        remainders,
        residual_slope,
        expected_slope,
        vacuous: false,
    })
}

fn single_fit(basis: &[Complex64], target: &[Complex64]) -> Option<Complex64> {
    let den: f64 = basis.iter().map(|b| b.norm_sqr()).sum();
    (den > 0.0).then(|| basis.iter().zip(target).map(|(b, t)| b.conj() * t).sum::<Complex64>() / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::scattering::AngularPolynomial;

    fn preset(d: usize, n: usize) -> Amplitude {
        Amplitude::gamma_exp(d, n, 0.5, AngularPolynomial::one()).unwrap()
    }

    #[test]
    fn one_plus_one_is_a_four_term_sum() {
        let a = preset(1, 1);
        let (r, s, p) = (0.8, 3.0, 0.4);
        let v = inner_integral(&a, &[1.0], &[-1.0], p, r, s, minimum_resolution(r, s)).unwrap();
        let mut expected = Complex64::new(0.0, 0.0);
        for z in [1.0, -1.0] {
            for g in [1.0, -1.0] {
                expected += Complex64::from_polar(1.0, r * s * (z - (-1.0) * g) - r * p * (-1.0) * g) * a.eval(&[z], &[g], r);
            }
        }
        assert!((v - expected).norm() < 1e-15);
        let scan = remainder_scan(&a, &[1.0], &[1.0], 0.0, 1.0, &[16.0, 32.0, 64.0, 128.0, 256.0]).unwrap();
        assert!(scan.vacuous && !scan.pass());
    }

    #[test]
    fn no_oscillation_gives_surface_integral() {
        let v = inner_integral(&preset(2, 1), &[1.0, 0.0], &[1.0], 0.0, 1.0, 0.0, 16).unwrap();
        assert!((v.re - 4.0 * PI * (-1.0f64).exp()).abs() < 1e-12 && v.im.abs() < 1e-12);
        assert!((v.re - 4.6229).abs() < 1e-4);
    }

    #[test]
    fn self_convergence_and_budget() {
        let a = preset(2, 1);
        let base = minimum_resolution(1.0, 40.0);
        let v1 = inner_integral(&a, &[0.6, 0.8], &[1.0], 0.3, 1.0, 40.0, base).unwrap();
        let v2 = inner_integral(&a, &[0.6, 0.8], &[1.0], 0.3, 1.0, 40.0, 2 * base).unwrap();
        assert!((v1 - v2).norm() < 1e-9);
        assert!(matches!(inner_integral(&a, &[1.0, 0.0], &[1.0], 0.0, 1.0, 40.0, base - 1), Err(Error::Configuration(_))));
    }

    #[test]
    fn leading_term_phases() {
        let a = preset(2, 2);
        let (r, s, p) = (1.0, 10.0, 0.7);
        let v = leading_terms(&a, &[1.0, 0.0], &[0.0, 1.0], p, r, s);
        let expected = 2.0 * (r * p).cos() * a.eval(&[1.0, 0.0], &[0.0, 1.0], r) * (2.0 * PI / (r * s));
        assert!((v - expected).norm() < 1e-14);

        let set = CriticalPointSet::new(2, 1, &[1.0, 0.0], &[1.0]);
        assert!((set.phases.0 - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        assert_eq!(set.signatures, (-1, 1));
        let set = CriticalPointSet::new(3, 1, &[1.0, 0.0, 0.0], &[1.0]);
        assert!((set.phases.0 - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(CriticalPointSet::new(1, 3, &[1.0], &[1.0, 0.0, 0.0]).signatures, (2, -2));
        for z in [set.phases.0, set.phases.1] {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn remainder_in_two_plus_one() {
        let a = preset(2, 1);
        let scan = remainder_scan(&a, &[1.0, 0.0], &[1.0], 0.0, 1.0, &[16.0, 32.0, 64.0, 128.0, 256.0]).unwrap();
        assert!(scan.residual_slope <= -0.8, "slope {}", scan.residual_slope);
        let (c1, c2) = scan.cross_magnitudes().unwrap();
        assert!((c1 - c2).abs() <= 0.1 * c1.max(c2), "{c1} {c2}");
        assert!(scan.to_table().to_csv().contains("residual_slope,"));
    }

    #[test]
    fn scan_needs_five_points() {
        assert!(remainder_scan(&preset(2, 1), &[1.0, 0.0], &[1.0], 0.0, 1.0, &[16.0, 32.0]).is_err());
    }
}
