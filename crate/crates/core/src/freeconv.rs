//! `γ_M`, the free additive convolution of the standard semicircle law with
//! the standard Gaussian, computed through its Cauchy transform, and the
//! moment–free-cumulant transform.
//!
//! Convention: `G(z) = ∫ dμ(t) / (z - t)`, so `Im G < 0` on the upper half
//! plane and the density is `-Im G(x + i0) / π`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// Half-width of the integration window for the Gaussian.
pub const GAUSS_CUTOFF: f64 = 12.0;
pub const DEFAULT_DAMPING: f64 = 0.5;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_FIXED_POINT_ITER: usize = 10_000;
pub const DEFAULT_ETA: f64 = 1e-2;

const QUAD_TOL: f64 = 1e-14;
const QUAD_MAX_DEPTH: usize = 60;

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208041499890,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One Gauss–Kronrod panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk21(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for k in 0..10 {
        let pair = f(c - h * XGK[k]) + f(c + h * XGK[k]);
        kronrod += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).norm())
}

/// Adaptive Gauss–Kronrod integration of a complex-valued integrand.
pub fn integrate_complex(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, 0usize)];
    let width = b - a;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk21(&f, lo, hi);
        // tolerance shared in proportion to the panel width
        if err <= tol * (hi - lo) / width || depth >= QUAD_MAX_DEPTH {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    total
}

fn phi(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

/// Upper Gaussian tail `P(Z > x)` for large `x` (asymptotic series).
fn gauss_tail(x: f64) -> f64 {
    let inv = 1.0 / (x * x);
    phi(x) / x * (1.0 - inv + 3.0 * inv * inv - 15.0 * inv * inv * inv)
}

/// Cauchy transform of the standard Gaussian, `∫ φ(t) / (z - t) dt`.
///
/// The near-singular part is removed analytically: with `x = Re z`,
/// `∫ (φ(t) - φ(x)) / (z - t) dt` is smooth and integrated adaptively on
/// `[-12, 12]`, and `φ(x) [log(z + 12) - log(z - 12)]` is added back. The
/// mass beyond ±12 is accounted for at leading order.
pub fn stieltjes_gaussian(z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("stieltjes_gaussian needs Im z > 0, got {z}")));
    }
    let l = GAUSS_CUTOFF;
    let x = z.re;
    let px = phi(x);
    let smooth = |t: f64| Complex64::new(phi(t) - px, 0.0) / (z - t);
    let (lo, hi) = (-l, l);
    let body = if x > lo && x < hi {
        integrate_complex(smooth, lo, x, QUAD_TOL) + integrate_complex(smooth, x, hi, QUAD_TOL)
    } else {
        integrate_complex(smooth, lo, hi, QUAD_TOL)
    };
    let log_part = ((z + l).ln() - (z - l).ln()) * px;
    let tail = gauss_tail(l) * (1.0 / (z - l) + 1.0 / (z + l));
    Ok(body + log_part + tail)
}

/// Result of the subordination fixed point at one point `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub value: Complex64,
    pub iterations: usize,
    /// `|G - G_gauss(z - G)|` at the returned value.
    pub residual: f64,
}

fn subordination(z: Complex64, start: Complex64, damping: f64, tol: f64) -> Result<FixedPoint> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(validation(format!("damping must lie in (0, 1], got {damping}")));
    }
    let mut g = start;
    for it in 1..=MAX_FIXED_POINT_ITER {
        let next = (1.0 - damping) * g + damping * stieltjes_gaussian(z - g)?;
        let step = (next - g).norm();
        g = next;
        if step < tol {
            let residual = (g - stieltjes_gaussian(z - g)?).norm();
            return Ok(FixedPoint { value: g, iterations: it, residual });
        }
    }
    let residual = (g - stieltjes_gaussian(z - g)?).norm();
    Err(Error::Convergence { context: format!("gamma_M subordination at z = {z}"), iterations: MAX_FIXED_POINT_ITER, residual })
}

/// Cauchy transform of `γ_M`: the fixed point `G = G_gauss(z - G)`, found by
/// damped iteration from `G = 1/z`. Adding a free semicircle of unit
/// variance shifts the argument by `G` itself.
pub fn gamma_m_stieltjes(z: Complex64, damping: f64, tol: f64) -> Result<FixedPoint> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("gamma_m_stieltjes needs Im z > 0, got {z}")));
    }
    subordination(z, 1.0 / z, damping, tol)
}

/// `G_{γ_M}(x + iη)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StieltjesGrid {
    pub xs: Vec<f64>,
    pub eta: f64,
    pub values: Vec<(f64, f64)>,
}

impl StieltjesGrid {
    pub fn compute(xs: &[f64], eta: f64) -> Result<Self> {
        let values = xs
            .iter()
            .map(|&x| {
                gamma_m_stieltjes(Complex64::new(x, eta), DEFAULT_DAMPING, DEFAULT_TOL).map(|g| (g.value.re, g.value.im))
            })
            .collect::<Result<_>>()?;
        Ok(Self { xs: xs.to_vec(), eta, values })
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,ReG,ImG")?;
        for (x, (re, im)) in self.xs.iter().zip(&self.values) {
            writeln!(w, "{x},{re},{im}")?;
        }
        Ok(())
    }
}

/// Density of `γ_M` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
    pub eta: f64,
    /// Whether the values are Richardson-extrapolated from `η` and `2η`.
    pub extrapolated: bool,
}

impl DensityCurve {
    /// Trapezoid integral of `x^k · density`.
    pub fn moment(&self, k: usize) -> f64 {
        self.integrate(|x| x.powi(k as i32))
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    fn integrate(&self, weight: impl Fn(f64) -> f64) -> f64 {
        self.xs
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (weight(x[0]) * d[0] + weight(x[1]) * d[1]))
            .sum()
    }

    /// Cumulative distribution function, normalised by the grid mass and
    /// linearly interpolated between grid points.
    pub fn cdf(&self) -> CdfTable {
        let mut values = Vec::with_capacity(self.xs.len());
        let mut acc = 0.0;
        values.push(0.0);
        for i in 1..self.xs.len() {
            acc += 0.5 * (self.xs[i] - self.xs[i - 1]) * (self.density[i] + self.density[i - 1]);
            values.push(acc);
        }
        let total = acc.max(f64::MIN_POSITIVE);
        CdfTable { xs: self.xs.clone(), values: values.into_iter().map(|v| v / total).collect() }
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,density")?;
        for (x, d) in self.xs.iter().zip(&self.density) {
            writeln!(w, "{x},{d}")?;
        }
        Ok(())
    }
}

/// Piecewise-linear CDF on a grid; 0 left of it and 1 right of it.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl CdfTable {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 || x < self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}

fn density_at(xs: &[f64], eta: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let g = gamma_m_stieltjes(Complex64::new(x, eta), DEFAULT_DAMPING, DEFAULT_TOL)?;
        out.push(-g.value.im / PI);
    }
    Ok(out)
}

/// `-(1/π) Im G(x + iη)`, optionally Richardson-extrapolated to `η → 0`
/// as `2 ρ_η - ρ_{2η}`. Extrapolated values are clipped at zero.
pub fn gamma_m_density(xs: &[f64], eta: f64, extrapolate: bool) -> Result<DensityCurve> {
    if !(1e-4..=1e-1).contains(&eta) {
        return Err(validation(format!("eta must lie in [1e-4, 1e-1], got {eta}")));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(validation("grid must be strictly increasing"));
    }
    let fine = density_at(xs, eta)?;
    let density = if extrapolate {
        let coarse = density_at(xs, 2.0 * eta)?;
        fine.iter().zip(&coarse).map(|(f, c)| (2.0 * f - c).max(0.0)).collect()
    } else {
        fine
    };
    Ok(DensityCurve { xs: xs.to_vec(), density, eta, extrapolated: extrapolate })
}

/// Evenly spaced grid on `[lo, hi]` with `points` points.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Default density grid: `[-8, 8]` in steps of 0.02.
pub fn default_grid() -> Vec<f64> {
    linspace(-8.0, 8.0, 801)
}

/// Default extrapolated density curve, computed once per process.
pub fn default_density() -> Result<&'static DensityCurve> {
    static CURVE: OnceLock<std::result::Result<DensityCurve, String>> = OnceLock::new();
    CURVE
        .get_or_init(|| gamma_m_density(&default_grid(), DEFAULT_ETA, true).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Convergence { context: e.clone(), iterations: 0, residual: f64::NAN })
}

/// `k`-th moment of `γ_M`, integrated from the default density curve.
pub fn gamma_m_numeric_moment(k: usize) -> Result<f64> {
    Ok(default_density()?.moment(k))
}

/// Moments from free cumulants: the sum over non-crossing partitions of
/// `[k]` of `Π_B κ_{|B|}`, evaluated by decomposing on the block that holds
/// the first element. `kappa[j]` is `κ_j`; index 0 is ignored and missing
/// orders count as zero.
pub fn moments_from_free_cumulants(kappa: &[f64], k: usize) -> f64 {
    moment_sequence(kappa, k)[k]
}

fn moment_sequence(kappa: &[f64], k: usize) -> Vec<f64> {
    let kap = |j: usize| kappa.get(j).copied().unwrap_or(0.0);
    let mut m = vec![0.0; k + 1];
    m[0] = 1.0;
    for n in 1..=k {
        // gaps[s][r]: ways to fill r elements into s gaps, Σ Π m_{i_j}
        let mut total = 0.0;
        let mut gaps = vec![0.0; n]; // s = 0 gaps: only r = 0
        gaps[0] = 1.0;
        for s in 1..=n {
            let mut next = vec![0.0; n];
            for (r, slot) in next.iter_mut().enumerate() {
                *slot = (0..=r).map(|i| m[i] * gaps[r - i]).sum();
            }
            gaps = next;
            total += kap(s) * gaps[n - s];
        }
        m[n] = total;
    }
    m
}

/// Inverse transform: free cumulants `κ_1..κ_k` (index 0 unused) from
/// moments `m_0..m_k` (index 0 unused).
pub fn free_cumulants_from_moments(moments: &[f64], k: usize) -> Vec<f64> {
    let mut kappa = vec![0.0; k + 1];
    for n in 1..=k {
        kappa[n] = 0.0;
        let without = moments_from_free_cumulants(&kappa, n);
        kappa[n] = moments.get(n).copied().unwrap_or(0.0) - without;
    }
    kappa
}

/// `E Z^k` for a standard Gaussian, as a float (0 for odd `k`).
pub fn gaussian_moments(k: usize) -> Vec<f64> {
    (0..=k).map(crate::trees::gaussian_moment).collect()
}

/// Free cumulants of `γ_M` up to order `k`: those of the Gaussian (obtained
/// from its moments) plus the unit semicircle's `κ₂ = 1`.
pub fn gamma_m_free_cumulants(k: usize) -> Vec<f64> {
    let mut kappa = free_cumulants_from_moments(&gaussian_moments(k), k);
    if k >= 2 {
        kappa[2] += 1.0;
    }
    kappa
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        let sum: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert_relative_eq!(sum, 2.0, epsilon = 1e-15);
        let (v, _) = gk21(&|x| Complex64::new(x.powi(8), 0.0), -1.0, 1.0);
        assert_relative_eq!(v.re, 2.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn far_field_is_one_over_z() {
        let z = Complex64::new(0.0, 1e6);
        let g = stieltjes_gaussian(z).unwrap();
        assert!(((g - 1.0 / z) / (1.0 / z)).norm() < 1e-5);
        let gm = gamma_m_stieltjes(z, DEFAULT_DAMPING, DEFAULT_TOL).unwrap().value;
        assert!(((gm - 1.0 / z) / (1.0 / z)).norm() < 1e-5);
    }

    #[test]
    fn imaginary_axis_gives_imaginary_values() {
        for y in [0.1, 1.0, 7.0] {
            let g = stieltjes_gaussian(Complex64::new(0.0, y)).unwrap();
            assert!(g.re.abs() < 1e-14 * g.norm().max(1.0), "{g}");
            assert!(g.im < 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(stieltjes_gaussian(Complex64::new(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(gamma_m_stieltjes(Complex64::new(1.0, -1.0), 0.5, 1e-12), Err(Error::Domain(_))));
        assert!(gamma_m_density(&[0.0], 1.0, false).is_err());
    }

    #[test]
    fn cumulant_examples() {
        let semicircle = [0.0, 0.0, 1.0];
        assert_eq!(moments_from_free_cumulants(&semicircle, 4), 2.0);
        assert_eq!(moments_from_free_cumulants(&semicircle, 6), 5.0);
        assert_eq!(moments_from_free_cumulants(&[0.0, 0.0, 2.0, 0.0, 1.0], 4), 9.0);
        assert_eq!(moments_from_free_cumulants(&[0.0; 8], 6), 0.0);
        assert_eq!(moments_from_free_cumulants(&[], 5), 0.0);
    }

    #[test]
    fn gamma_m_cumulants() {
        let kappa = gamma_m_free_cumulants(6);
        assert_relative_eq!(kappa[2], 2.0);
        assert_relative_eq!(kappa[4], 1.0);
        assert_relative_eq!(kappa[6], 4.0);
        assert_relative_eq!(moments_from_free_cumulants(&kappa, 6), 56.0);
        let round = free_cumulants_from_moments(&[1.0, 0.0, 2.0, 0.0, 9.0], 4);
        assert_relative_eq!(round[4], 1.0);
    }

    #[test]
    fn cdf_table_interpolates() {
        let curve = DensityCurve { xs: vec![0.0, 1.0, 2.0], density: vec![0.5, 0.5, 0.5], eta: 0.01, extrapolated: false };
        let cdf = curve.cdf();
        assert_eq!(cdf.eval(-1.0), 0.0);
        assert_relative_eq!(cdf.eval(0.5), 0.25);
        assert_eq!(cdf.eval(3.0), 1.0);
        assert_relative_eq!(curve.mass(), 1.0);
    }
}
