//! One-dimensional quadrature primitives shared by the rule builders and the
//! Fourier transforms: Gauss-Legendre nodes, a globally adaptive
//! Gauss-Kronrod (7, 15) integrator for complex integrands, and pairwise
//! summation.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
///
/// Nodes are mirrored bit-exactly: `x[m - 1 - i] == -x[i]` and the middle
/// node of an odd rule is exactly zero.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m / 2;
    for i in 0..half {
        // i-th largest root; Tricomi initial guess refined by Newton.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[m - 1 - i] = z;
        x[i] = -z;
        w[m - 1 - i] = weight;
        w[i] = weight;
    }
    if m % 2 == 1 {
        let (_, d) = legendre_with_derivative(m, 0.0);
        x[half] = 0.0;
        w[half] = 2.0 / (d * d);
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Sums complex values pairwise; the result depends only on the order of
/// `values`.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += *v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Real-valued counterpart of [`pairwise_sum`].
pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

/// Streaming pairwise summation: adding `n` values costs O(log n) memory
/// and gives the same error behaviour as [`pairwise_sum`].
#[derive(Debug, Clone, Default)]
pub struct PairwiseAccumulator {
    levels: Vec<Option<Complex64>>,
}

impl PairwiseAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: Complex64) {
        let mut carry = value;
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some(v) => carry += v,
                None => {
                    *slot = Some(carry);
                    return;
                }
            }
        }
        self.levels.push(Some(carry));
    }

    pub fn total(&self) -> Complex64 {
        self.levels
            .iter()
            .flatten()
            .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: Complex64, error: f64) -> Self {
        Self { value, error }
    }
}

/// Absolute/relative stopping rule for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 0.0,
            max_subdivisions: 20_000,
        }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            ..Self::default()
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel = rel;
        self
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    l1: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod += pair * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel {
        a,
        b,
        value,
        error,
        l1: l1 * half.abs(),
    }
}

#[derive(PartialEq)]
struct Ranked(f64, usize);

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over the panels
/// delimited by `breakpoints` (sorted, at least two entries).
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate meets `tol` or the round-off floor of the integrand.
pub fn integrate_panels<F>(f: F, breakpoints: &[f64], tol: &Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let mut panels: Vec<Panel> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(Estimate::new(Complex64::new(0.0, 0.0), 0.0));
    }
    let mut heap: BinaryHeap<Ranked> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| Ranked(p.error, i))
        .collect();
    let mut total_error: f64 = panels.iter().map(|p| p.error).sum();
    let mut subdivisions = 0usize;
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let l1: f64 = panels.iter().map(|p| p.l1).sum();
        let target = tol
            .abs
            .max(tol.rel * value.norm())
            .max(50.0 * f64::EPSILON * l1);
        if total_error <= target {
            break;
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                estimate: total_error,
                target,
            });
        }
        let Some(Ranked(_, worst)) = heap.pop() else {
            break;
        };
        let (a, b) = (panels[worst].a, panels[worst].b);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            // Panel cannot be split further in floating point.
            return Err(Error::ToleranceNotMet {
                estimate: total_error,
                target,
            });
        }
        let left = gk15(&f, a, mid);
        let right = gk15(&f, mid, b);
        total_error += left.error + right.error - panels[worst].error;
        panels[worst] = left;
        heap.push(Ranked(panels[worst].error, worst));
        panels.push(right);
        heap.push(Ranked(panels[panels.len() - 1].error, panels.len() - 1));
        subdivisions += 1;
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<Complex64> = panels.iter().map(|p| p.value).collect();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Estimate::new(pairwise_sum(&values), error))
}

/// Convenience wrapper for a single interval.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    integrate_panels(f, &[a, b], tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for m in [1usize, 2, 5, 8, 16, 33] {
            let (x, w) = gauss_legendre(m);
            for deg in 0..(2 * m) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn gauss_legendre_nodes_are_mirrored_exactly() {
        let (x, w) = gauss_legendre(31);
        for i in 0..31 {
            assert!(x[i] == -x[30 - i]);
            assert_eq!(w[i].to_bits(), w[30 - i].to_bits());
        }
    }

    #[test]
    fn adaptive_integrates_oscillatory_gaussian() {
        let f = |x: f64| Complex64::new(0.0, 3.0 * x).exp() * (-x * x).exp();
        let est = integrate(f, -10.0, 10.0, &Tolerance::absolute(1e-13)).unwrap();
        let exact = std::f64::consts::PI.sqrt() * (-9.0f64 / 4.0).exp();
        assert!((est.value.re - exact).abs() < 1e-12);
        assert!(est.value.im.abs() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure_when_budget_exhausted() {
        let f = |x: f64| Complex64::new((1.0 / x).sin(), 0.0);
        let tol = Tolerance {
            abs: 1e-14,
            rel: 0.0,
            max_subdivisions: 5,
        };
        match integrate(f, 1e-6, 1.0, &tol) {
            Err(Error::ToleranceNotMet { estimate, .. }) => assert!(estimate > 0.0),
            other => panic!("expected tolerance failure, got {other:?}"),
        }
    }

    #[test]
    fn streaming_accumulator_matches_pairwise_sum() {
        let v: Vec<Complex64> = (0..777).map(|i| Complex64::new(1.0 / (i as f64 + 1.0), 0.5)).collect();
        let mut acc = PairwiseAccumulator::new();
        v.iter().for_each(|x| acc.add(*x));
        assert!((acc.total() - pairwise_sum(&v)).norm() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive_sum() {
        let v: Vec<Complex64> = (0..1000).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(499_500.0, -499_500.0));
    }
}
