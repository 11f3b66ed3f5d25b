//! Eigenvalues, empirical spectral distributions, distances between them,
//! and the spectral-norm scaling experiments.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::ensembles::{centered_laplacian, laplacian_of, mean_adjacency, spectral_matrix, EnsembleSpec, Model, SymMatrix};
use crate::error::{validation, Error, Result};
use crate::moments::{pairwise_sum, MomentReport, MomentSource, ReportMetadata};
use crate::rng::{derive_seed, Stream};

/// Absolute tolerance of the Lévy-distance bisection.
pub const LEVY_TOL: f64 = 1e-9;

/// All eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues_sym(m: &SymMatrix) -> Result<Vec<f64>> {
    let asym = m.max_asymmetry();
    if asym > 1e-12 {
        return Err(validation(format!("matrix is not symmetric (max |M - Mᵀ| = {asym:e})")));
    }
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mat = Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j));
    let mut ev = mat.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Convergence {
        context: format!("symmetric eigensolver: {e:?}"),
        iterations: 0,
        residual: f64::NAN,
    })?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues of one sampled matrix, with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    /// The matrix was divided by this before diagonalising.
    pub scale_applied: f64,
    pub ensemble: Option<EnsembleSpec>,
    /// Seconds spent sampling and diagonalising.
    pub wall_time: f64,
}

impl SpectralSample {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(validation("eigenvalues must be finite"));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { n: eigenvalues.len(), eigenvalues, scale_applied: 1.0, ensemble: None, wall_time: 0.0 })
    }

    pub fn from_matrix(m: &SymMatrix, scale_applied: f64) -> Result<Self> {
        let start = Instant::now();
        let eigenvalues = eigenvalues_sym(m)?;
        Ok(Self { n: m.dim(), eigenvalues, scale_applied, ensemble: None, wall_time: start.elapsed().as_secs_f64() })
    }

    /// Samples the ensemble's limiting-law matrix and diagonalises it.
    pub fn from_spec(spec: &EnsembleSpec) -> Result<Self> {
        let start = Instant::now();
        let (m, scale) = spectral_matrix(spec)?;
        let eigenvalues = eigenvalues_sym(&m)?;
        Ok(Self {
            n: spec.n,
            eigenvalues,
            scale_applied: scale,
            ensemble: Some(spec.clone()),
            wall_time: start.elapsed().as_secs_f64(),
        })
    }

    /// `(1/N) Σ λ_i^k`
    pub fn moment(&self, k: usize) -> f64 {
        if self.eigenvalues.is_empty() {
            return 0.0;
        }
        let powers: Vec<f64> = self.eigenvalues.iter().map(|l| l.powi(k as i32)).collect();
        pairwise_sum(&powers) / self.n as f64
    }

    /// Monte Carlo standard error of the `k`-th moment, treating eigenvalues
    /// as draws: `sd(λ^k)/√N`.
    pub fn moment_standard_error(&self, k: usize) -> f64 {
        let n = self.n as f64;
        let mean = self.moment(k);
        let var = self.eigenvalues.iter().map(|l| (l.powi(k as i32) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    /// One eigenvalue per row, preceded by `#` metadata lines.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# N={} scale_applied={}", self.n, self.scale_applied)?;
        if let Some(spec) = &self.ensemble {
            writeln!(w, "# ensemble={}", serde_json::to_string(spec)?)?;
        }
        writeln!(w, "eigenvalue")?;
        for l in &self.eigenvalues {
            writeln!(w, "{l}")?;
        }
        Ok(())
    }
}

fn sample_metadata(s: &SpectralSample, trials: usize) -> ReportMetadata {
    ReportMetadata { seed: s.ensemble.as_ref().map(|e| e.seed), n: Some(s.n), trials: Some(trials) }
}

/// `k ↦ (1/N) Σ λ_i^k` for each requested order.
pub fn esd_moments(s: &SpectralSample, orders: &[usize]) -> MomentReport {
    MomentReport {
        source: MomentSource::Empirical,
        graphon: None,
        moments: orders.iter().map(|&k| (k, s.moment(k))).collect(),
        metadata: Some(sample_metadata(s, 1)),
    }
}

/// Moments of the ESD pooled across several samples.
pub fn pooled_esd_moments(samples: &[SpectralSample], orders: &[usize]) -> Result<MomentReport> {
    let first = samples.first().ok_or_else(|| validation("no samples to pool"))?;
    let moments = orders
        .iter()
        .map(|&k| (k, samples.iter().map(|s| s.moment(k)).sum::<f64>() / samples.len() as f64))
        .collect();
    Ok(MomentReport {
        source: MomentSource::Empirical,
        graphon: None,
        moments,
        metadata: Some(sample_metadata(first, samples.len())),
    })
}

/// `max(|λ_min|, |λ_max|)`
pub fn spectral_norm(s: &SpectralSample) -> f64 {
    match (s.eigenvalues.first(), s.eigenvalues.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

/// Right-continuous step CDF of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(validation("empirical CDF needs at least one sample"));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(validation("samples must not be NaN"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{i : x_i ≤ x} / n`
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }
}

impl TryFrom<&SpectralSample> for EmpiricalCdf {
    type Error = Error;

    fn try_from(s: &SpectralSample) -> Result<Self> {
        Self::new(&s.eigenvalues)
    }
}

fn levy_condition(f: &EmpiricalCdf, g: &EmpiricalCdf, eps: f64) -> bool {
    // Both sides are right-continuous step functions of x, so the worst case
    // sits on a jump of G or of F(· ∓ ε). At x = a ± ε the value F(a) is
    // used directly rather than F((a ± ε) ∓ ε), which may round across a.
    let lower = |x: f64, fx: f64| fx - eps <= g.eval(x);
    let upper = |x: f64, fx: f64| g.eval(x) <= fx + eps;
    g.sorted.iter().all(|&x| lower(x, f.eval(x - eps)) && upper(x, f.eval(x + eps)))
        && f.sorted.iter().all(|&a| lower(a + eps, f.eval(a)) && upper(a - eps, f.eval(a)))
}

/// Lévy distance `inf{ε : F(x-ε)-ε ≤ G(x) ≤ F(x+ε)+ε ∀x}`, by bisection.
pub fn levy_distance(f: &EmpiricalCdf, g: &EmpiricalCdf) -> f64 {
    if f == g {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if levy_condition(f, g, 0.0) {
        return 0.0;
    }
    while hi - lo > LEVY_TOL {
        let mid = 0.5 * (lo + hi);
        if levy_condition(f, g, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sup_x |F(x) - G(x)|`
pub fn ks_distance(f: &EmpiricalCdf, g: &EmpiricalCdf) -> f64 {
    f.sorted.iter().chain(&g.sorted).map(|&x| (f.eval(x) - g.eval(x)).abs()).fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance_to(f: &EmpiricalCdf, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = f.sorted.len() as f64;
    f.sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            ((i + 1) as f64 / n - c).max(c - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormScanRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    pub norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScanResult {
    pub rows: Vec<NormScanRow>,
    pub summary: Vec<NormSummary>,
    /// `[√A₁, √(2A₂)]` with `A₁`, `A₂` the extreme entry variances.
    pub bracket: (f64, f64),
}

impl NormScanResult {
    pub fn median(&self, n: usize) -> Option<f64> {
        self.summary.iter().find(|s| s.n == n).map(|s| s.median)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "N,trial,norm,ratio")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.n, r.trial, r.norm, r.ratio)?;
        }
        Ok(())
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Seed of trial `t` at dimension `n`, derived from the template seed.
pub fn trial_seed(seed: u64, n: usize, t: usize) -> u64 {
    derive_seed(seed, Stream::Trial, n, t)
}

fn summarise(rows: &[NormScanRow], ns: &[usize], value: impl Fn(&NormScanRow) -> f64) -> Vec<NormSummary> {
    ns.iter()
        .map(|&n| {
            let v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(&value).collect();
            NormSummary {
                n,
                min: v.iter().copied().fold(f64::INFINITY, f64::min),
                median: median(&v),
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

fn check_scan_args(ns: &[usize], trials: usize) -> Result<()> {
    if ns.is_empty() || trials == 0 {
        return Err(validation("need at least one N and one trial"));
    }
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        return Err(validation(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

fn variance_extremes(spec: &EnsembleSpec) -> Result<(f64, f64)> {
    let Model::GeneralizedWigner { graphon, variance, .. } = &spec.model else {
        return Err(validation("norm scans need a generalized Wigner ensemble"));
    };
    let n = spec.n;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let s = match variance {
                crate::ensembles::VarianceRule::Grid => {
                    graphon.eval_unchecked((i + 1) as f64 / n as f64, (j + 1) as f64 / n as f64)
                }
                crate::ensembles::VarianceRule::BlockAverage => graphon.block_average(i, j, n),
            };
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    Ok((lo, hi))
}

/// `‖Δ_N‖ / √(2N log N)` of the unscaled centered Laplacian, over a grid of
/// `N` and independent trials.
pub fn norm_scan(template: &EnsembleSpec, ns: &[usize], trials: usize) -> Result<NormScanResult> {
    check_scan_args(ns, trials)?;
    if let Model::GeneralizedWigner { mean, .. } = template.model {
        if mean != 0.0 {
            return Err(validation("norm_scan needs a mean-zero ensemble; use mean_norm_scan"));
        }
    }
    let largest = *ns.iter().max().unwrap_or(&2);
    let (a1, a2) = variance_extremes(&template.with_n(largest))?;
    let mut rows = Vec::with_capacity(ns.len() * trials);
    for &n in ns {
        for t in 0..trials {
            let spec = EnsembleSpec::new(template.model.clone(), n, trial_seed(template.seed, n, t))?;
            let lap = centered_laplacian(&spec)?;
            let norm = spectral_norm(&SpectralSample::from_matrix(&lap, 1.0)?);
            let nf = n as f64;
            rows.push(NormScanRow { n, trial: t, norm, ratio: norm / (2.0 * nf * nf.ln()).sqrt() });
        }
    }
    let summary = summarise(&rows, ns, |r| r.ratio);
    Ok(NormScanResult { rows, summary, bracket: (a1.sqrt(), (2.0 * a2).sqrt()) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanNormRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    /// `‖Δ_N‖ / N`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanNormScanResult {
    pub rows: Vec<MeanNormRow>,
    /// Median ratio per `N`.
    pub medians: BTreeMap<usize, f64>,
    /// `m = ‖E Δ_N‖ / N` at the largest `N`.
    pub limit: f64,
}

impl MeanNormScanResult {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "N,trial,ratio")?;
        for r in &self.rows {
            writeln!(w, "{},{},{}", r.n, r.trial, r.ratio)?;
        }
        Ok(())
    }
}

/// `‖Δ_N‖ / N` for an ensemble with nonzero means (no centering).
pub fn mean_norm_scan(template: &EnsembleSpec, ns: &[usize], trials: usize) -> Result<MeanNormScanResult> {
    check_scan_args(ns, trials)?;
    let largest = *ns.iter().max().unwrap_or(&2);
    let mean_lap = laplacian_of(&mean_adjacency(&template.with_n(largest))?);
    let limit = spectral_norm(&SpectralSample::from_matrix(&mean_lap, 1.0)?) / largest as f64;
    let mut rows = Vec::new();
    for &n in ns {
        for t in 0..trials {
            let spec = EnsembleSpec::new(template.model.clone(), n, trial_seed(template.seed, n, t))?;
            let lap = laplacian_of(&crate::ensembles::sample(&spec)?.matrix);
            let norm = spectral_norm(&SpectralSample::from_matrix(&lap, 1.0)?);
            rows.push(MeanNormRow { n, trial: t, ratio: norm / n as f64 });
        }
    }
    let medians = ns
        .iter()
        .map(|&n| (n, median(&rows.iter().filter(|r| r.n == n).map(|r| r.ratio).collect::<Vec<_>>())))
        .collect();
    Ok(MeanNormScanResult { rows, medians, limit })
}

/// Fixed-width histogram. Bins are right-open except the last, which is
/// closed; values outside the range are tallied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if bins == 0 {
            return Err(validation("histogram needs at least one bin"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(validation(format!("invalid histogram range [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|b| if b == bins { hi } else { lo + b as f64 * width }).collect();
        let mut h = Self { edges, counts: vec![0; bins], underflow: 0, overflow: 0 };
        for &v in values {
            if v < lo {
                h.underflow += 1;
            } else if v > hi {
                h.overflow += 1;
            } else {
                // guard against rounding at the bin edges
                let mut b = (((v - lo) / width) as usize).min(bins - 1);
                while b > 0 && v < h.edges[b] {
                    b -= 1;
                }
                while b + 1 < bins && v >= h.edges[b + 1] {
                    b += 1;
                }
                h.counts[b] += 1;
            }
        }
        Ok(h)
    }

    /// Range spanning all values.
    pub fn covering(values: &[f64], bins: usize) -> Result<Self> {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self::new(values, bins, (lo, hi))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "left,right,count")?;
        for (b, c) in self.counts.iter().enumerate() {
            writeln!(w, "{},{},{}", self.edges[b], self.edges[b + 1], c)?;
        }
        Ok(())
    }
}

/// Histogram of a sample's eigenvalues.
pub fn histogram(s: &SpectralSample, bins: usize, range: (f64, f64)) -> Result<Histogram> {
    Histogram::new(&s.eigenvalues, bins, range)
}
