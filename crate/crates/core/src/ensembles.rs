//! Random matrix and random graph ensembles, and their Laplacians.
//!
//! Every sampler is a pure function of its [`EnsembleSpec`]: entry `(i, j)`
//! draws from a generator keyed by `(seed, i, j)`, so identical specs give
//! bitwise identical matrices. Graph adjacencies have zero diagonal.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::graphon::{hom_density, Graphon, Profile, SimpleGraph};
use crate::rng::{stream, Stream};

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Fills the upper triangle (including the diagonal) from `f` and mirrors it.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Wraps row-major data; rejects non-finite or asymmetric input.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(validation(format!("expected {} entries, got {}", n * n, data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(validation("matrix entries must be finite"));
        }
        let m = Self { n, data };
        let asym = m.max_asymmetry();
        if asym > 1e-12 {
            return Err(validation(format!("matrix is not symmetric (max |M - Mᵀ| = {asym:e})")));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks(self.n.max(1)).map(|r| r.iter().sum()).collect()
    }

    fn zip_with(&self, other: &SymMatrix, f: impl Fn(f64, f64) -> f64) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(validation(format!("dimension mismatch: {} vs {}", self.n, other.n)));
        }
        Ok(SymMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() })
    }

    /// Little-endian binary: `u64` dimension header, then row-major `f64`s.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 8];
        r.read_exact(&mut header)?;
        let n = u64::from_le_bytes(header) as usize;
        let mut data = Vec::with_capacity(n * n);
        let mut buf = [0u8; 8];
        for _ in 0..n * n {
            r.read_exact(&mut buf)?;
            data.push(f64::from_le_bytes(buf));
        }
        Self::from_row_major(n, data)
    }

    /// One row per line, comma separated. Intended for small matrices.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        for row in self.data.chunks(self.n.max(1)) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryLaw {
    #[default]
    Gaussian,
    Rademacher,
}

/// How the variance profile is read off the graphon.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceRule {
    /// `σ²_ij = W(i/N, j/N)` with 1-based `i`, `j`.
    #[default]
    Grid,
    /// `σ²_ij = N² ∫_{I_i × I_j} W`.
    BlockAverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Model {
    /// Independent entries with variance profile `W` and common mean `mean`.
    GeneralizedWigner {
        graphon: Graphon,
        #[serde(default)]
        entry_law: EntryLaw,
        #[serde(default)]
        variance: VarianceRule,
        #[serde(default)]
        mean: f64,
    },
    /// Edge `(i,j)` with probability `eps · f(i/N, j/N)`.
    InhomEr { f: Graphon, eps: f64 },
    /// Latent uniforms `X_i`; edge with probability `eps · W(X_i, X_j)`.
    SparseWRandom { graphon: Graphon, eps: f64 },
    /// Maximum-entropy graph with expected degrees `kstar`.
    Constrained { kstar: Vec<u64> },
    /// `Ā_N + Y_N`: Gaussian off-diagonal part plus an independent Gaussian diagonal.
    Decoupled { graphon: Graphon },
    /// `R G R + α R^{1/2} U R^{1/2}` for `W(x,y) = r(x) r(y)`.
    Multiplicative { profile: Profile },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub model: Model,
    pub n: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(model: Model, n: usize, seed: u64) -> Result<Self> {
        let spec = Self { model, n, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(validation(format!("dimension N must be at least 2, got {}", self.n)));
        }
        match &self.model {
            Model::InhomEr { eps, .. } if !(*eps > 0.0) => Err(validation(format!("eps must be positive, got {eps}"))),
            Model::SparseWRandom { eps, .. } if !(*eps > 0.0 && *eps <= 1.0) => {
                Err(validation(format!("eps must lie in (0,1], got {eps}")))
            }
            Model::Constrained { kstar } => {
                if kstar.len() != self.n {
                    return Err(validation(format!("kstar has {} entries for N = {}", kstar.len(), self.n)));
                }
                if kstar.iter().any(|&k| k == 0) {
                    return Err(validation("kstar entries must be positive"));
                }
                Ok(())
            }
            Model::GeneralizedWigner { mean, .. } if !mean.is_finite() => Err(validation("mean must be finite")),
            _ => Ok(()),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }
}

fn variance(w: &Graphon, rule: VarianceRule, i: usize, j: usize, n: usize) -> f64 {
    match rule {
        VarianceRule::Grid => w.eval_unchecked((i + 1) as f64 / n as f64, (j + 1) as f64 / n as f64),
        VarianceRule::BlockAverage => w.block_average(i, j, n),
    }
}

fn normal(seed: u64, s: Stream, i: usize, j: usize) -> f64 {
    stream(seed, s, i, j).sample(StandardNormal)
}

fn uniform(seed: u64, s: Stream, i: usize, j: usize) -> f64 {
    stream(seed, s, i, j).random::<f64>()
}

/// Generalized Wigner matrix with zero diagonal.
pub fn sample_generalized_wigner(spec: &EnsembleSpec) -> Result<SymMatrix> {
    spec.validate()?;
    let Model::GeneralizedWigner { graphon, entry_law, variance: rule, mean } = &spec.model else {
        return Err(validation("spec is not a generalized Wigner ensemble"));
    };
    let n = spec.n;
    Ok(SymMatrix::from_upper(n, |i, j| {
        if i == j {
            return 0.0;
        }
        let sigma = variance(graphon, *rule, i, j, n).sqrt();
        let z = match entry_law {
            EntryLaw::Gaussian => normal(spec.seed, Stream::Entry, i, j),
            EntryLaw::Rademacher => {
                if stream(spec.seed, Stream::Entry, i, j).random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        mean + sigma * z
    }))
}

/// Inhomogeneous Erdős–Rényi adjacency.
pub fn sample_inhom_er(spec: &EnsembleSpec) -> Result<SymMatrix> {
    spec.validate()?;
    let Model::InhomEr { f, eps } = &spec.model else {
        return Err(validation("spec is not an inhomogeneous Erdős–Rényi ensemble"));
    };
    let probs = inhom_er_probabilities(f, *eps, spec.n)?;
    Ok(bernoulli_graph(&probs, spec.seed))
}

fn inhom_er_probabilities(f: &Graphon, eps: f64, n: usize) -> Result<SymMatrix> {
    let p = SymMatrix::from_upper(n, |i, j| if i == j { 0.0 } else { eps * variance(f, VarianceRule::Grid, i, j, n) });
    let worst = p.max_abs();
    if worst > 1.0 {
        return Err(validation(format!("edge probability eps·f reaches {worst} > 1")));
    }
    Ok(p)
}

fn bernoulli_graph(p: &SymMatrix, seed: u64) -> SymMatrix {
    SymMatrix::from_upper(p.dim(), |i, j| {
        if i != j && uniform(seed, Stream::Entry, i, j) < p.get(i, j) {
            1.0
        } else {
            0.0
        }
    })
}

/// Sparse `W`-random graph; also returns the latent positions.
pub fn sample_sparse_w_random(spec: &EnsembleSpec) -> Result<(SymMatrix, Vec<f64>)> {
    spec.validate()?;
    let Model::SparseWRandom { graphon, eps } = &spec.model else {
        return Err(validation("spec is not a sparse W-random ensemble"));
    };
    let latents: Vec<f64> = (0..spec.n).map(|i| uniform(spec.seed, Stream::Latent, i, 0)).collect();
    let p = SymMatrix::from_upper(spec.n, |i, j| {
        if i == j {
            0.0
        } else {
            eps * graphon.eval_unchecked(latents[i], latents[j])
        }
    });
    Ok((bernoulli_graph(&p, spec.seed), latents))
}

/// Solution of the degree-constrained maximum-entropy equations.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSolution {
    pub x: Vec<f64>,
    /// Edge probabilities `x_i x_j / (1 + x_i x_j)`, zero diagonal.
    pub p: SymMatrix,
    /// `max_i |k_i - Σ_j p_ij|`
    pub residual: f64,
    pub iterations: usize,
}

pub const CONSTRAINED_TOL: f64 = 1e-10;
pub const CONSTRAINED_MAX_ITER: usize = 100_000;
const CONSTRAINED_DAMPING: f64 = 0.5;

fn degree_residual(kstar: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    (0..n)
        .map(|i| {
            let deg: f64 = (0..n).filter(|&j| j != i).map(|j| x[i] * x[j] / (1.0 + x[i] * x[j])).sum();
            (kstar[i] - deg).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves `k_i = Σ_{j≠i} x_i x_j / (1 + x_i x_j)` by the damped fixed point
/// `x_i ← k_i / Σ_{j≠i} x_j / (1 + x_i x_j)`, starting from `k_i / √(Σ k)`.
pub fn solve_constrained(kstar: &[u64], tol: f64, max_iter: usize) -> Result<ConstrainedSolution> {
    let n = kstar.len();
    if n < 2 {
        return Err(validation("need at least two vertices"));
    }
    if let Some(&k) = kstar.iter().find(|&&k| k == 0 || k as usize >= n) {
        return Err(validation(format!("expected degree {k} must lie in [1, N-1] for N = {n}")));
    }
    let k: Vec<f64> = kstar.iter().map(|&v| v as f64).collect();
    let total: f64 = k.iter().sum();
    let mut x: Vec<f64> = k.iter().map(|v| v / total.sqrt()).collect();
    let mut residual = degree_residual(&k, &x);
    let mut iterations = 0;
    while residual >= tol {
        if iterations == max_iter {
            return Err(Error::Convergence {
                context: "degree-constrained fixed point".into(),
                iterations,
                residual,
            });
        }
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let s: f64 = (0..n).filter(|&j| j != i).map(|j| x[j] / (1.0 + x[i] * x[j])).sum();
                (1.0 - CONSTRAINED_DAMPING) * x[i] + CONSTRAINED_DAMPING * k[i] / s
            })
            .collect();
        x = next;
        iterations += 1;
        residual = degree_residual(&k, &x);
        if !residual.is_finite() {
            return Err(Error::Convergence { context: "degree-constrained fixed point diverged".into(), iterations, residual });
        }
    }
    let p = SymMatrix::from_upper(n, |i, j| if i == j { 0.0 } else { x[i] * x[j] / (1.0 + x[i] * x[j]) });
    Ok(ConstrainedSolution { x, p, residual, iterations })
}

/// Independent Bernoulli(`p_ij`) adjacency.
pub fn sample_constrained(p: &SymMatrix, seed: u64) -> SymMatrix {
    bernoulli_graph(p, seed)
}

/// Scaling `ε_N = m_N² / Σ_l k_l` with `m_N = max_l k_l`.
pub fn constrained_scaling(kstar: &[u64]) -> f64 {
    let m = kstar.iter().copied().max().unwrap_or(0) as f64;
    m * m / kstar.iter().sum::<u64>() as f64
}

/// `Ā_N + Y_N`, already scaled by `1/√N`.
pub fn sample_decoupled_model(w: &Graphon, n: usize, seed: u64) -> SymMatrix {
    let mut m = SymMatrix::from_upper(n, |i, j| {
        if i == j {
            0.0
        } else {
            variance(w, VarianceRule::Grid, i, j, n).sqrt() / (n as f64).sqrt() * normal(seed, Stream::Entry, i, j)
        }
    });
    for i in 0..n {
        let row: f64 = (0..n).filter(|&j| j != i).map(|j| variance(w, VarianceRule::Grid, i, j, n)).sum();
        let y = normal(seed, Stream::Diagonal, i, 0) * (row / n as f64).sqrt();
        m.set(i, i, y);
    }
    m
}

/// Matrix model `R G R + α R^{1/2} U R^{1/2}` with `R = diag(√(N g_i))`,
/// `g_i = ∫_{I_i} r`, `α = (∫ r)^{1/2}`, `G` with `N(0, 1/N)` entries and
/// `U` a diagonal of standard Gaussians.
pub fn sample_multiplicative_model(r: &Profile, n: usize, seed: u64) -> Result<SymMatrix> {
    r.validate()?;
    let nf = n as f64;
    let scale: Vec<f64> = (0..n).map(|i| (nf * r.integral_over(i as f64 / nf, (i + 1) as f64 / nf)).sqrt()).collect();
    let alpha = r.power_integral(1).sqrt();
    let mut m = SymMatrix::from_upper(n, |i, j| scale[i] * scale[j] * normal(seed, Stream::Entry, i, j) / nf.sqrt());
    for i in 0..n {
        let u = normal(seed, Stream::Diagonal, i, 0);
        m.set(i, i, m.get(i, i) + alpha * scale[i] * u);
    }
    Ok(m)
}

/// Graph Laplacian `Δ(i,j) = A(i,j)` off the diagonal and
/// `Δ(i,i) = -Σ_{k≠i} A(i,k)`. The diagonal of `A` is ignored.
pub fn laplacian_of(a: &SymMatrix) -> SymMatrix {
    let n = a.dim();
    let mut out = a.clone();
    for i in 0..n {
        let off: f64 = (0..n).filter(|&k| k != i).map(|k| a.get(i, k)).sum();
        out.set(i, i, -off);
    }
    out
}

/// `(M - means) / √N`.
pub fn center_scale(m: &SymMatrix, means: &SymMatrix) -> Result<SymMatrix> {
    center_scale_by(m, means, (m.dim() as f64).sqrt())
}

/// `(M - means) / scale` for a positive scale (e.g. `√(N ε_N)`).
pub fn center_scale_by(m: &SymMatrix, means: &SymMatrix, scale: f64) -> Result<SymMatrix> {
    if !(scale > 0.0) {
        return Err(validation(format!("scale must be positive, got {scale}")));
    }
    m.zip_with(means, |a, b| (a - b) / scale)
}

/// A draw from an ensemble.
#[derive(Debug, Clone)]
pub struct Sample {
    pub matrix: SymMatrix,
    pub latents: Option<Vec<f64>>,
}

/// Draws the raw matrix of any ensemble (adjacency for graph and Wigner
/// models, the already-scaled matrix for the decoupled and multiplicative
/// models).
pub fn sample(spec: &EnsembleSpec) -> Result<Sample> {
    spec.validate()?;
    let matrix = match &spec.model {
        Model::GeneralizedWigner { .. } => sample_generalized_wigner(spec)?,
        Model::InhomEr { .. } => sample_inhom_er(spec)?,
        Model::SparseWRandom { .. } => {
            let (m, latents) = sample_sparse_w_random(spec)?;
            return Ok(Sample { matrix: m, latents: Some(latents) });
        }
        Model::Constrained { kstar } => {
            let sol = solve_constrained(kstar, CONSTRAINED_TOL, CONSTRAINED_MAX_ITER)?;
            sample_constrained(&sol.p, spec.seed)
        }
        Model::Decoupled { graphon } => sample_decoupled_model(graphon, spec.n, spec.seed),
        Model::Multiplicative { profile } => sample_multiplicative_model(profile, spec.n, spec.seed)?,
    };
    Ok(Sample { matrix, latents: None })
}

/// Entrywise mean `E[A]` of the raw adjacency (zero diagonal), where defined.
pub fn mean_adjacency(spec: &EnsembleSpec) -> Result<SymMatrix> {
    let n = spec.n;
    let off = |v: f64| SymMatrix::from_upper(n, |i, j| if i == j { 0.0 } else { v });
    match &spec.model {
        Model::GeneralizedWigner { mean, .. } => Ok(off(*mean)),
        Model::InhomEr { f, eps } => inhom_er_probabilities(f, *eps, n),
        Model::SparseWRandom { graphon, eps } => Ok(off(eps * hom_density(&SimpleGraph::path(2), graphon)?)),
        Model::Constrained { kstar } => Ok(solve_constrained(kstar, CONSTRAINED_TOL, CONSTRAINED_MAX_ITER)?.p),
        Model::Decoupled { .. } | Model::Multiplicative { .. } => Ok(SymMatrix::zeros(n)),
    }
}

/// Scale that turns the centered Laplacian into a matrix with a limiting ESD:
/// `√N` (Wigner), `√(N ε)` (graph models), 1 for the pre-scaled models.
pub fn natural_scale(spec: &EnsembleSpec) -> f64 {
    let n = spec.n as f64;
    match &spec.model {
        Model::GeneralizedWigner { .. } => n.sqrt(),
        Model::InhomEr { eps, .. } | Model::SparseWRandom { eps, .. } => (n * eps).sqrt(),
        Model::Constrained { kstar } => (n * constrained_scaling(kstar)).sqrt(),
        Model::Decoupled { .. } | Model::Multiplicative { .. } => 1.0,
    }
}

/// Graphon that the moment formula is evaluated at for this model, if any.
pub fn limit_graphon(model: &Model) -> Option<Graphon> {
    match model {
        Model::GeneralizedWigner { graphon, .. }
        | Model::SparseWRandom { graphon, .. }
        | Model::Decoupled { graphon } => Some(graphon.clone()),
        Model::InhomEr { f, .. } => Some(f.clone()),
        Model::Multiplicative { profile } => Some(Graphon::Product(profile.clone())),
        Model::Constrained { .. } => None,
    }
}

/// Unscaled centered Laplacian `Δ_N - E Δ_N`.
pub fn centered_laplacian(spec: &EnsembleSpec) -> Result<SymMatrix> {
    let a = sample(spec)?.matrix;
    let centered = a.zip_with(&mean_adjacency(spec)?, |x, m| x - m)?;
    Ok(laplacian_of(&centered))
}

/// The matrix whose ESD approximates the limiting law: the centered,
/// scaled Laplacian for Wigner and graph models, the model matrix itself
/// for the decoupled and multiplicative models.
pub fn spectral_matrix(spec: &EnsembleSpec) -> Result<(SymMatrix, f64)> {
    match spec.model {
        Model::Decoupled { .. } | Model::Multiplicative { .. } => Ok((sample(spec)?.matrix, 1.0)),
        _ => {
            let scale = natural_scale(spec);
            let lap = centered_laplacian(spec)?;
            Ok((lap.zip_with(&SymMatrix::zeros(spec.n), |x, _| x / scale)?, scale))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn wigner(c: f64, n: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec::new(
            Model::GeneralizedWigner {
                graphon: Graphon::Constant(c),
                entry_law: EntryLaw::Gaussian,
                variance: VarianceRule::Grid,
                mean: 0.0,
            },
            n,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn zero_graphon_gives_zero_matrix() {
        assert_eq!(sample_generalized_wigner(&wigner(0.0, 20, 1)).unwrap(), SymMatrix::zeros(20));
        assert_eq!(sample_decoupled_model(&Graphon::Constant(0.0), 10, 3), SymMatrix::zeros(10));
    }

    #[test]
    fn unit_variance_concentrates() {
        let n = 500;
        let a = sample_generalized_wigner(&wigner(1.0, n, 11)).unwrap();
        let count = n * (n - 1) / 2;
        let mut sum_sq = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum_sq += a.get(i, j).powi(2);
            }
        }
        let mean_sq = sum_sq / count as f64;
        // chi-square: sd of the mean of Z² is √(2/count)
        let bound = 1.1 * 2.0 / ((n * (n + 1) / 2) as f64).sqrt();
        assert!((mean_sq - 1.0).abs() < bound.max(3.0 * (2.0 / count as f64).sqrt()), "{mean_sq}");
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = sample_generalized_wigner(&wigner(0.7, 40, 5)).unwrap();
        let b = sample_generalized_wigner(&wigner(0.7, 40, 5)).unwrap();
        let c = sample_generalized_wigner(&wigner(0.7, 40, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rademacher_entries_have_magnitude_sigma() {
        let spec = EnsembleSpec::new(
            Model::GeneralizedWigner {
                graphon: Graphon::Constant(0.25),
                entry_law: EntryLaw::Rademacher,
                variance: VarianceRule::Grid,
                mean: 0.0,
            },
            30,
            2,
        )
        .unwrap();
        let a = sample_generalized_wigner(&spec).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                let expected = if i == j { 0.0 } else { 0.5 };
                assert_eq!(a.get(i, j).abs(), expected);
            }
        }
    }

    #[test]
    fn laplacian_examples() {
        let a = SymMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let l = laplacian_of(&a);
        assert_eq!(l.data(), &[-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(laplacian_of(&SymMatrix::zeros(3)), SymMatrix::zeros(3));
        let big = sample_generalized_wigner(&wigner(1.0, 50, 9)).unwrap();
        assert!(laplacian_of(&big).row_sums().iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn laplacian_ignores_input_diagonal() {
        let a = SymMatrix::from_row_major(2, vec![5.0, 1.0, 1.0, 7.0]).unwrap();
        assert_eq!(laplacian_of(&a).data(), &[-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn center_scale_examples() {
        let m = sample_generalized_wigner(&wigner(1.0, 4, 1)).unwrap();
        assert_eq!(center_scale(&m, &m).unwrap(), SymMatrix::zeros(4));
        let four_i = SymMatrix::from_upper(4, |i, j| if i == j { 4.0 } else { 0.0 });
        let out = center_scale(&four_i, &SymMatrix::zeros(4)).unwrap();
        assert_eq!(out.get(2, 2), 2.0);
        assert!(center_scale(&four_i, &SymMatrix::zeros(3)).is_err());
        assert!(center_scale_by(&four_i, &four_i, 0.0).is_err());
        let scaled = center_scale_by(&four_i, &SymMatrix::zeros(4), (4.0f64 * 0.25).sqrt()).unwrap();
        assert_eq!(scaled.get(0, 0), 4.0);
    }

    #[test]
    fn inhom_er_edge_cases() {
        let full = EnsembleSpec::new(Model::InhomEr { f: Graphon::Constant(1.0), eps: 1.0 }, 12, 3).unwrap();
        let a = sample_inhom_er(&full).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(a.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let empty = EnsembleSpec::new(Model::InhomEr { f: Graphon::Constant(0.0), eps: 0.5 }, 12, 3).unwrap();
        assert_eq!(sample_inhom_er(&empty).unwrap(), SymMatrix::zeros(12));
        let too_big = EnsembleSpec::new(Model::InhomEr { f: Graphon::Constant(0.8), eps: 2.0 }, 12, 3).unwrap();
        assert!(matches!(sample_inhom_er(&too_big), Err(Error::Validation(_))));
    }

    #[test]
    fn inhom_er_density() {
        let n = 1000;
        let spec = EnsembleSpec::new(Model::InhomEr { f: Graphon::Product(Profile::Sqrt), eps: 0.25 }, n, 21).unwrap();
        let a = sample_inhom_er(&spec).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let edges = a.data().iter().sum::<f64>() / 2.0;
        // expected probability summed over the grid, binomial-type standard error
        let p = mean_adjacency(&spec).unwrap();
        let expected = p.data().iter().sum::<f64>() / 2.0;
        let var: f64 = p.data().iter().map(|q| q * (1.0 - q)).sum::<f64>() / 2.0;
        assert!((edges - expected).abs() < 3.0 * var.sqrt(), "{edges} vs {expected}");
        // and the grid average tends to 0.25 · 4/9
        assert!((expected / pairs - 0.25 * 4.0 / 9.0).abs() < 2e-3);
    }

    #[test]
    fn sparse_w_random_cases() {
        let empty = EnsembleSpec::new(Model::SparseWRandom { graphon: Graphon::Constant(0.0), eps: 0.3 }, 50, 1).unwrap();
        let (a, latents) = sample_sparse_w_random(&empty).unwrap();
        assert_eq!(a, SymMatrix::zeros(50));
        assert!(latents.iter().all(|x| (0.0..1.0).contains(x)));
        let er = EnsembleSpec::new(Model::SparseWRandom { graphon: Graphon::Constant(1.0), eps: 0.1 }, 400, 1).unwrap();
        let (a, _) = sample_sparse_w_random(&er).unwrap();
        let edges = a.data().iter().sum::<f64>() / 2.0;
        let pairs = 400.0 * 399.0 / 2.0;
        assert!((edges - 0.1 * pairs).abs() < 4.0 * (pairs * 0.09).sqrt());
    }

    #[test]
    fn sparse_w_random_regular_graphon_degrees() {
        // circulant step kernel: W = 1 when the blocks are within one step (mod 4)
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i: i32| (0..4).map(|j: i32| if (i - j).rem_euclid(4) != 2 { 1.0 } else { 0.0 }).collect())
            .collect();
        let w = crate::graphon::empirical_graphon(&rows).unwrap();
        let d_w = 0.75;
        let (n, eps) = (1200, 0.2);
        let spec = EnsembleSpec::new(Model::SparseWRandom { graphon: w, eps }, n, 4).unwrap();
        let (a, _) = sample_sparse_w_random(&spec).unwrap();
        let degrees = a.row_sums();
        let mean_deg = degrees.iter().sum::<f64>() / n as f64;
        assert!((mean_deg / (n as f64 * eps) - d_w).abs() < 0.02, "{mean_deg}");
        let worst = degrees.iter().map(|d| (d / (n as f64 * eps) - d_w).abs()).fold(0.0, f64::max);
        assert!(worst < 0.25, "{worst}");
    }

    #[test]
    fn constrained_two_vertices_cannot_converge() {
        let err = solve_constrained(&[1, 1], 1e-10, 2000).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
        assert!(matches!(solve_constrained(&[3, 1, 1], 1e-10, 10), Err(Error::Validation(_))));
    }

    #[test]
    fn constrained_homogeneous_degrees() {
        let n = 60;
        let sol = solve_constrained(&vec![6; n], 1e-12, 10_000).unwrap();
        let x0 = sol.x[0];
        assert!(sol.x.iter().all(|x| (x - x0).abs() < 1e-12));
        // scalar equation: d = (N-1) x²/(1+x²)
        assert_relative_eq!(x0 * x0 / (1.0 + x0 * x0), 6.0 / (n as f64 - 1.0), epsilon = 1e-12);
        assert_relative_eq!(sol.p.get(0, 1), 6.0 / 59.0, epsilon = 1e-12);
    }

    #[test]
    fn constrained_cube_root_degrees() {
        let kstar: Vec<u64> = (1..=500u64).map(|i| (i as f64).cbrt().floor() as u64).collect();
        let sol = solve_constrained(&kstar, 1e-10, 100_000).unwrap();
        assert!(sol.residual < 1e-8);
        for i in 0..500 {
            assert_eq!(sol.p.get(i, i), 0.0);
            for j in 0..500 {
                if i != j {
                    assert!(sol.p.get(i, j) > 0.0 && sol.p.get(i, j) < 1.0);
                }
            }
        }
        assert_relative_eq!(constrained_scaling(&kstar), 49.0 / kstar.iter().sum::<u64>() as f64);
    }

    #[test]
    fn constrained_sampler_edge_cases() {
        assert_eq!(sample_constrained(&SymMatrix::zeros(8), 1), SymMatrix::zeros(8));
        let near = SymMatrix::from_upper(10, |i, j| if i == j { 0.0 } else { 1.0 - 1e-12 });
        let a = sample_constrained(&near, 1);
        assert_eq!(a.data().iter().sum::<f64>(), 90.0);
    }

    #[test]
    fn decoupled_diagonal_variance() {
        let n = 2000;
        let w = Graphon::Product(Profile::Identity);
        let m = sample_decoupled_model(&w, n, 8);
        let diag: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
        let sample_var = diag.iter().map(|d| d * d).sum::<f64>() / n as f64;
        // E Y_ii² averaged over i = (1/N²) Σ_i Σ_{j≠i} σ²_ij
        let mut expected = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    expected += ((i + 1) * (j + 1)) as f64 / (n * n) as f64;
                }
            }
        }
        expected /= (n * n) as f64;
        assert!((sample_var - expected).abs() < 0.05 * expected, "{sample_var} vs {expected}");
    }

    #[test]
    fn multiplicative_zero_profile() {
        let m = sample_multiplicative_model(&Profile::Affine { a: 0.0, b: 0.0 }, 30, 1).unwrap();
        assert_eq!(m, SymMatrix::zeros(30));
    }

    #[test]
    fn constant_graphon_profile_is_exact() {
        let spec = wigner(0.3, 9, 1);
        let Model::GeneralizedWigner { graphon, .. } = &spec.model else { unreachable!() };
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(variance(graphon, VarianceRule::Grid, i, j, 9), 0.3);
                assert_relative_eq!(variance(graphon, VarianceRule::BlockAverage, i, j, 9), 0.3);
            }
        }
    }

    #[test]
    fn binary_and_csv_export() {
        let m = sample_generalized_wigner(&wigner(1.0, 5, 3)).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 25 * 8);
        assert_eq!(&buf[..8], &5u64.to_le_bytes());
        assert_eq!(SymMatrix::read_binary(buf.as_slice()).unwrap(), m);
        let mut csv = Vec::new();
        m.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
    }

    #[test]
    fn spec_validation_and_json() {
        assert!(EnsembleSpec::new(Model::Decoupled { graphon: Graphon::Constant(1.0) }, 1, 0).is_err());
        assert!(EnsembleSpec::new(Model::Constrained { kstar: vec![1, 0] }, 2, 0).is_err());
        let json = r#"{"model":{"type":"inhom_er","f":{"type":"product","profile":"sqrt"},"eps":0.25},"n":1000,"seed":7}"#;
        let spec: EnsembleSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.n, 1000);
        assert!(matches!(spec.model, Model::InhomEr { eps, .. } if eps == 0.25));
        let wig = r#"{"model":{"type":"generalized_wigner","graphon":{"type":"constant","c":0.5}},"n":10,"seed":1}"#;
        let spec: EnsembleSpec = serde_json::from_str(wig).unwrap();
        assert!(matches!(spec.model, Model::GeneralizedWigner { entry_law: EntryLaw::Gaussian, mean, .. } if mean == 0.0));
    }
}
