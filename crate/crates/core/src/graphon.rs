//! Graphons, empirical graphons, distances and tree homomorphism densities.
//!
//! A graphon is a symmetric measurable kernel `W: [0,1]² → [0,1]`. Three
//! shapes are supported: constants, separable products `r(x)·r(y)`, and
//! uniform step functions on an `n × n` block grid. Step graphons use the
//! half-open block convention `I_j = [(j-1)/n, j/n)` with the last block
//! closed, so `x = 1` belongs to block `n`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// Points per axis of the 1-d midpoint rule.
pub const QUAD_POINTS_1D: usize = 1024;
/// Points per axis of the 2-d tensor midpoint rule.
pub const QUAD_POINTS_2D: usize = 256;
/// Largest block count accepted by exact cut-norm enumeration.
pub const EXACT_CUT_NORM_MAX_BLOCKS: usize = 16;
/// Largest block count for which the cut distance enumerates all permutations.
pub const EXHAUSTIVE_PERMUTATION_MAX_BLOCKS: usize = 8;
/// Random restarts used by the heuristic cut norm.
pub const CUT_NORM_RESTARTS: usize = 32;

const SYMMETRY_TOL: f64 = 1e-12;

/// One-dimensional profile `r: [0,1] → [0,1]` of a product graphon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `r(x) = √x`
    Sqrt,
    /// `r(x) = x`
    Identity,
    /// `r(x) = a + b·x`
    Affine { a: f64, b: f64 },
    /// Values on a uniform mesh of `[0,1]` (endpoints included), linearly interpolated.
    Sampled(Vec<f64>),
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Sqrt | Profile::Identity => Ok(()),
            Profile::Affine { a, b } => {
                let ends = [*a, a + b];
                if ends.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
                    Ok(())
                } else {
                    Err(validation(format!("affine profile a={a}, b={b} leaves [0,1]")))
                }
            }
            Profile::Sampled(values) => {
                if values.len() < 2 {
                    return Err(validation("sampled profile needs at least 2 mesh points"));
                }
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(validation(format!("sampled profile value {v} outside [0,1]")));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Sqrt => x.sqrt(),
            Profile::Identity => x,
            Profile::Affine { a, b } => a + b * x,
            Profile::Sampled(values) => {
                let segments = values.len() - 1;
                let pos = x * segments as f64;
                let k = (pos.floor() as usize).min(segments - 1);
                let frac = pos - k as f64;
                values[k] * (1.0 - frac) + values[k + 1] * frac
            }
        }
    }

    /// `∫₀¹ r(x)^d dx`, symbolic for named profiles.
    pub fn power_integral(&self, d: usize) -> f64 {
        let d_f = d as f64;
        match self {
            Profile::Sqrt => 2.0 / (d_f + 2.0),
            Profile::Identity => 1.0 / (d_f + 1.0),
            Profile::Affine { a, b } => {
                if b.abs() < 1e-15 {
                    a.powi(d as i32)
                } else {
                    ((a + b).powi(d as i32 + 1) - a.powi(d as i32 + 1)) / (b * (d_f + 1.0))
                }
            }
            Profile::Sampled(_) => midpoint_1d(|x| self.eval(x).powi(d as i32)),
        }
    }

    /// `∫_lo^hi r(x) dx` for `0 ≤ lo ≤ hi ≤ 1`.
    pub fn integral_over(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Profile::Sqrt => 2.0 / 3.0 * (hi.powf(1.5) - lo.powf(1.5)),
            Profile::Identity => 0.5 * (hi * hi - lo * lo),
            Profile::Affine { a, b } => a * (hi - lo) + 0.5 * b * (hi * hi - lo * lo),
            Profile::Sampled(values) => {
                // exact for the piecewise-linear interpolant
                let segments = values.len() - 1;
                let h = 1.0 / segments as f64;
                let mut total = 0.0;
                for k in 0..segments {
                    let (s0, s1) = (k as f64 * h, (k + 1) as f64 * h);
                    let (a, b) = (lo.max(s0), hi.min(s1));
                    if b > a {
                        total += 0.5 * (b - a) * (self.eval(a) + self.eval(b));
                    }
                }
                total
            }
        }
    }
}

/// Uniform step graphon on `n × n` blocks, values stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    n: usize,
    values: Vec<f64>,
}

impl StepGraphon {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(validation("step graphon needs at least one block"));
        }
        if values.len() != n * n {
            return Err(validation(format!("expected {} values, got {}", n * n, values.len())));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(validation(format!("entry ({i},{j}) = {v} outside [0,1]")));
                }
                if (v - values[j * n + i]).abs() > SYMMETRY_TOL {
                    return Err(validation(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(validation("step graphon rows must form a square matrix"));
        }
        Self::new(n, rows.concat())
    }

    pub fn blocks(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Relabels blocks: entry `(i,j)` becomes `W(σ(i), σ(j))`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let values = (0..n * n).map(|k| self.get(perm[k / n], perm[k % n])).collect();
        Self { n, values }
    }

    fn degrees(&self) -> Vec<f64> {
        self.values.chunks(self.n).map(|r| r.iter().sum::<f64>() / self.n as f64).collect()
    }
}

/// A graphon in one of the three supported shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphonRepr", into = "GraphonRepr")]
pub enum Graphon {
    Constant(f64),
    Product(Profile),
    Step(StepGraphon),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum GraphonRepr {
    Constant { c: f64 },
    Product { profile: Profile },
    Step { n: usize, values: Vec<Vec<f64>> },
}

impl TryFrom<GraphonRepr> for Graphon {
    type Error = Error;

    fn try_from(repr: GraphonRepr) -> Result<Self> {
        match repr {
            GraphonRepr::Constant { c } => Graphon::constant(c),
            GraphonRepr::Product { profile } => Graphon::product(profile),
            GraphonRepr::Step { n, values } => {
                if values.len() != n {
                    return Err(validation(format!("step graphon declares n={n} but has {} rows", values.len())));
                }
                Ok(Graphon::Step(StepGraphon::from_rows(&values)?))
            }
        }
    }
}

impl From<Graphon> for GraphonRepr {
    fn from(w: Graphon) -> Self {
        match w {
            Graphon::Constant(c) => GraphonRepr::Constant { c },
            Graphon::Product(profile) => GraphonRepr::Product { profile },
            Graphon::Step(s) => GraphonRepr::Step { n: s.n, values: s.rows() },
        }
    }
}

impl Graphon {
    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(validation(format!("constant graphon value {c} outside [0,1]")));
        }
        Ok(Graphon::Constant(c))
    }

    pub fn product(profile: Profile) -> Result<Self> {
        profile.validate()?;
        Ok(Graphon::Product(profile))
    }

    /// Step graphon whose block `(i,j)` carries `f(i/n, j/n)` (1-based `i`, `j`).
    pub fn step_from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let nf = n as f64;
        let values = (0..n * n)
            .map(|k| f((k / n + 1) as f64 / nf, (k % n + 1) as f64 / nf))
            .collect();
        Ok(Graphon::Step(StepGraphon::new(n, values)?))
    }

    /// Pointwise evaluation; coordinates must lie in `[0,1]`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!("graphon evaluated at ({x}, {y}) outside [0,1]²")));
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match self {
            Graphon::Constant(c) => *c,
            Graphon::Product(p) => p.eval(x) * p.eval(y),
            Graphon::Step(s) => s.get(block_index(x, s.n), block_index(y, s.n)),
        }
    }

    /// Step representation for constant and step graphons.
    pub fn as_step(&self) -> Option<StepGraphon> {
        match self {
            Graphon::Constant(c) => Some(StepGraphon { n: 1, values: vec![*c] }),
            Graphon::Step(s) => Some(s.clone()),
            Graphon::Product(_) => None,
        }
    }

    /// Degree function `d(x) = ∫ W(x,y) dy`.
    pub fn degree(&self, x: f64) -> f64 {
        match self {
            Graphon::Constant(c) => *c,
            Graphon::Product(p) => p.eval(x) * p.power_integral(1),
            Graphon::Step(s) => {
                let i = block_index(x, s.n);
                s.values[i * s.n..(i + 1) * s.n].iter().sum::<f64>() / s.n as f64
            }
        }
    }

    /// `N² ∫_{I_i × I_j} W` with 0-based block indices `i`, `j` of an `N`-grid.
    pub fn block_average(&self, i: usize, j: usize, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Graphon::Constant(c) => *c,
            Graphon::Product(p) => {
                let gi = p.integral_over(i as f64 / nf, (i + 1) as f64 / nf) * nf;
                let gj = p.integral_over(j as f64 / nf, (j + 1) as f64 / nf) * nf;
                gi * gj
            }
            Graphon::Step(s) => {
                let row = interval_overlaps(i, n, s.n);
                let col = interval_overlaps(j, n, s.n);
                let mut total = 0.0;
                for &(a, wa) in &row {
                    for &(b, wb) in &col {
                        total += wa * wb * s.get(a, b);
                    }
                }
                total * nf * nf
            }
        }
    }
}

/// Block of a uniform `n`-grid containing `x`; the last block is closed.
pub fn block_index(x: f64, n: usize) -> usize {
    ((x * n as f64).floor() as usize).min(n - 1)
}

// Overlap lengths of the fine interval `i` of an `n`-grid with the blocks of an `m`-grid.
fn interval_overlaps(i: usize, n: usize, m: usize) -> Vec<(usize, f64)> {
    let (lo, hi) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
    let first = block_index(lo, m);
    let last = block_index(hi, m);
    (first..=last)
        .filter_map(|b| {
            let a = lo.max(b as f64 / m as f64);
            let c = hi.min((b + 1) as f64 / m as f64);
            (c > a).then_some((b, c - a))
        })
        .collect()
}

/// Builds the empirical graphon of a weighted graph given by its symmetric
/// `n × n` weight matrix.
pub fn empirical_graphon(profile: &[Vec<f64>]) -> Result<Graphon> {
    Ok(Graphon::Step(StepGraphon::from_rows(profile)?))
}

fn midpoint_1d(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / QUAD_POINTS_1D as f64;
    (0..QUAD_POINTS_1D).map(|k| f((k as f64 + 0.5) * h)).sum::<f64>() * h
}

fn midpoint_2d(f: impl Fn(f64, f64) -> f64) -> f64 {
    let m = QUAD_POINTS_2D;
    let h = 1.0 / m as f64;
    let mut total = 0.0;
    for a in 0..m {
        let x = (a as f64 + 0.5) * h;
        let row: f64 = (0..m).map(|b| f(x, (b as f64 + 0.5) * h)).sum();
        total += row;
    }
    total * h * h
}

/// `∫∫ |W1 − W2|`: exact block algebra when both sides are piecewise
/// constant, tensor midpoint rule otherwise.
pub fn l1_distance(w1: &Graphon, w2: &Graphon) -> f64 {
    match (w1.as_step(), w2.as_step()) {
        (Some(a), Some(b)) => step_l1(&a, &b),
        _ => midpoint_2d(|x, y| (w1.eval_unchecked(x, y) - w2.eval_unchecked(x, y)).abs()),
    }
}

/// `∫∫ |W − f|` against an arbitrary kernel, by the tensor midpoint rule.
pub fn l1_distance_to_fn(w: &Graphon, f: impl Fn(f64, f64) -> f64) -> f64 {
    midpoint_2d(|x, y| (w.eval_unchecked(x, y) - f(x, y)).abs())
}

fn step_l1(a: &StepGraphon, b: &StepGraphon) -> f64 {
    let mut cuts: Vec<f64> = (0..=a.n)
        .map(|k| k as f64 / a.n as f64)
        .chain((0..=b.n).map(|k| k as f64 / b.n as f64))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let cells: Vec<(f64, usize, usize)> = cuts
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (w[1] - w[0], block_index(mid, a.n), block_index(mid, b.n))
        })
        .collect();
    let mut total = 0.0;
    for &(hx, ax, bx) in &cells {
        for &(hy, ay, by) in &cells {
            total += hx * hy * (a.get(ax, ay) - b.get(bx, by)).abs();
        }
    }
    total
}

/// Signed step kernel on `n × n` uniform blocks (typically `W1 − W2`).
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    n: usize,
    values: Vec<f64>,
}

impl StepKernel {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(validation("step kernel needs n ≥ 1 and n² values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(validation("step kernel entries must be finite"));
        }
        Ok(Self { n, values })
    }

    pub fn difference(a: &StepGraphon, b: &StepGraphon) -> Result<Self> {
        if a.n != b.n {
            return Err(validation(format!("block counts differ: {} vs {}", a.n, b.n)));
        }
        Ok(Self { n: a.n, values: a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect() })
    }

    pub fn blocks(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// `|∫_{S×T} K|` for block sets given as bit masks.
    pub fn rectangle(&self, s_mask: u64, t_mask: u64) -> f64 {
        let mut total = 0.0;
        for i in (0..self.n).filter(|i| s_mask >> i & 1 == 1) {
            for j in (0..self.n).filter(|j| t_mask >> j & 1 == 1) {
                total += self.get(i, j);
            }
        }
        total.abs() / (self.n * self.n) as f64
    }

    /// `∫∫ |K|`.
    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / (self.n * self.n) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutNormMode {
    Exact,
    Heuristic,
}

/// Cut norm `sup_{S,T} |∫_{S×T} K|` of a step kernel. For step kernels the
/// supremum is attained on unions of blocks.
pub fn cut_norm(kernel: &StepKernel, mode: CutNormMode) -> Result<f64> {
    match mode {
        CutNormMode::Exact => cut_norm_exact(kernel),
        CutNormMode::Heuristic => Ok(cut_norm_heuristic(kernel, CUT_NORM_RESTARTS, 0)),
    }
}

/// Exact cut norm: every row subset `S` is enumerated (Gray-code order) and
/// the optimal column set for `S` is read off the signs of the column sums.
pub fn cut_norm_exact(kernel: &StepKernel) -> Result<f64> {
    let n = kernel.n;
    if n > EXACT_CUT_NORM_MAX_BLOCKS {
        return Err(Error::Capacity(format!(
            "exact cut norm enumerates 2^n row sets; n={n} exceeds {EXACT_CUT_NORM_MAX_BLOCKS}"
        )));
    }
    let mut col = vec![0.0; n];
    let mut best = (0.0, 0u64, 0u64);
    let mut s_mask = 0u64;
    for step in 1u64..(1 << n) {
        let flip = step.trailing_zeros() as usize;
        s_mask ^= 1 << flip;
        let sign = if s_mask >> flip & 1 == 1 { 1.0 } else { -1.0 };
        for (j, c) in col.iter_mut().enumerate() {
            *c += sign * kernel.get(flip, j);
        }
        let (mut pos, mut neg, mut t_pos, mut t_neg) = (0.0, 0.0, 0u64, 0u64);
        for (j, &c) in col.iter().enumerate() {
            if c > 0.0 {
                pos += c;
                t_pos |= 1 << j;
            } else if c < 0.0 {
                neg -= c;
                t_neg |= 1 << j;
            }
        }
        if pos > best.0 {
            best = (pos, s_mask, t_pos);
        }
        if neg > best.0 {
            best = (neg, s_mask, t_neg);
        }
    }
    Ok(kernel.rectangle(best.1, best.2))
}

/// Column sums over `S` and the best `T` for them: `(Σ_j max(0, ±c_j), T)`.
fn best_columns(kernel: &StepKernel, s_mask: u64, sign: f64) -> (f64, u64) {
    let n = kernel.n;
    let mut total = 0.0;
    let mut t_mask = 0u64;
    for j in 0..n {
        let c: f64 = (0..n).filter(|i| s_mask >> i & 1 == 1).map(|i| sign * kernel.get(i, j)).sum();
        if c > 0.0 {
            total += c;
            t_mask |= 1 << j;
        }
    }
    (total, t_mask)
}

/// Local search with random restarts; a lower bound on the cut norm.
///
/// Each start alternates best-`S`-for-`T` and best-`T`-for-`S` steps, then
/// tries single-block flips of `S`, until neither improves.
pub fn cut_norm_heuristic(kernel: &StepKernel, restarts: usize, seed: u64) -> f64 {
    let n = kernel.n;
    assert!(n <= 64, "heuristic cut norm stores block sets in a u64 mask");
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = (0.0, 0u64, 0u64);
    for restart in 0..restarts.max(1) {
        let start = if restart == 0 { full } else { rng.random::<u64>() & full };
        for sign in [1.0, -1.0] {
            let mut s_mask = start;
            let (mut value, mut t_mask) = best_columns(kernel, s_mask, sign);
            loop {
                let mut improved = false;
                // best S for the current T
                let mut s_alt = 0u64;
                for i in 0..n {
                    let r: f64 = (0..n).filter(|j| t_mask >> j & 1 == 1).map(|j| sign * kernel.get(i, j)).sum();
                    if r > 0.0 {
                        s_alt |= 1 << i;
                    }
                }
                let (v, t) = best_columns(kernel, s_alt, sign);
                if v > value + 1e-15 {
                    (value, s_mask, t_mask, improved) = (v, s_alt, t, true);
                }
                for i in 0..n {
                    let flipped = s_mask ^ (1 << i);
                    let (v, t) = best_columns(kernel, flipped, sign);
                    if v > value + 1e-15 {
                        (value, s_mask, t_mask, improved) = (v, flipped, t, true);
                    }
                }
                if !improved {
                    break;
                }
            }
            if value > best.0 {
                best = (value, s_mask, t_mask);
            }
        }
    }
    kernel.rectangle(best.1, best.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermutationSearch {
    /// Exhaustive up to 8 blocks, local search above.
    Auto,
    Exhaustive,
    /// Greedy degree alignment plus pairwise-swap descent from several starts.
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutDistance {
    pub value: f64,
    /// Block relabeling `σ` applied to the second graphon.
    pub permutation: Vec<usize>,
    /// True when every permutation was examined; otherwise `value` is an upper bound.
    pub exhaustive: bool,
}

/// Cut distance between two step graphons with the same block count,
/// minimised over block permutations. The infimum over all measure
/// preserving maps is bounded above by this value.
pub fn cut_distance_step(w1: &Graphon, w2: &Graphon, search: PermutationSearch) -> Result<CutDistance> {
    let (a, b) = match (w1.as_step(), w2.as_step()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(validation("cut distance requires step (or constant) graphons")),
    };
    if a.n != b.n {
        return Err(validation(format!("block counts differ: {} vs {}", a.n, b.n)));
    }
    let n = a.n;
    let mode = if n <= EXACT_CUT_NORM_MAX_BLOCKS { CutNormMode::Exact } else { CutNormMode::Heuristic };
    let score = |perm: &[usize]| -> Result<f64> { cut_norm(&StepKernel::difference(&a, &b.permuted(perm))?, mode) };
    let exhaustive = match search {
        PermutationSearch::Auto => n <= EXHAUSTIVE_PERMUTATION_MAX_BLOCKS,
        PermutationSearch::Exhaustive => {
            if n > 10 {
                return Err(Error::Capacity(format!("exhaustive permutation search with n={n} blocks")));
            }
            true
        }
        PermutationSearch::Local => false,
    };
    if exhaustive {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = (score(&perm)?, perm.clone());
        while next_permutation(&mut perm) {
            let v = score(&perm)?;
            if v < best.0 {
                best = (v, perm.clone());
            }
        }
        return Ok(CutDistance { value: best.0, permutation: best.1, exhaustive: true });
    }

    let mut starts: Vec<Vec<usize>> = vec![(0..n).collect(), degree_alignment(&a, &b)];
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x5eed);
    for _ in 0..8 {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, rng.random_range(0..=i));
        }
        starts.push(p);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mut perm in starts {
        let mut current = score(&perm)?;
        loop {
            let mut improved: Option<(f64, usize, usize)> = None;
            for i in 0..n {
                for j in i + 1..n {
                    perm.swap(i, j);
                    let v = score(&perm)?;
                    perm.swap(i, j);
                    if v < improved.map_or(current, |t| t.0) - 1e-15 {
                        improved = Some((v, i, j));
                    }
                }
            }
            match improved {
                Some((v, i, j)) => {
                    perm.swap(i, j);
                    current = v;
                }
                None => break,
            }
        }
        if best.as_ref().map_or(true, |b| current < b.0) {
            best = Some((current, perm));
        }
    }
    let (value, permutation) = best.expect("at least one start");
    Ok(CutDistance { value, permutation, exhaustive: false })
}

// Match blocks of equal degree rank: σ(i) is the block of `b` whose degree
// rank equals the rank of block `i` in `a`.
fn degree_alignment(a: &StepGraphon, b: &StepGraphon) -> Vec<usize> {
    let rank = |g: &StepGraphon| {
        let d = g.degrees();
        let mut idx: Vec<usize> = (0..g.n).collect();
        idx.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
        idx
    };
    let (ra, rb) = (rank(a), rank(b));
    let mut perm = vec![0; a.n];
    for (pos, &i) in ra.iter().enumerate() {
        perm[i] = rb[pos];
    }
    perm
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Finite simple graph: no loops, no multi-edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(validation(format!("edge ({u},{v}) references a vertex ≥ {vertices}")));
            }
            if u == v {
                return Err(validation(format!("self-loop at vertex {u}")));
            }
            out.push((u.min(v), u.max(v)));
        }
        let mut sorted = out.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(validation("duplicate edge"));
        }
        Ok(Self { vertices, edges: out })
    }

    /// Path with `vertices` vertices.
    pub fn path(vertices: usize) -> Self {
        Self { vertices, edges: (1..vertices).map(|v| (v - 1, v)).collect() }
    }

    /// Star with a centre (vertex 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self { vertices: leaves + 1, edges: (1..=leaves).map(|v| (0, v)).collect() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }

    /// Canonical string of the unlabeled forest (sorted AHU codes of the
    /// components, each rooted at its centre).
    pub fn canonical_form(&self) -> String {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices];
        let mut codes = Vec::new();
        for start in 0..self.vertices {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < comp.len() {
                for &w in &adj[comp[k]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                k += 1;
            }
            let code = centres(&adj, &comp)
                .into_iter()
                .map(|c| ahu(&adj, c, usize::MAX))
                .min()
                .expect("component has a centre");
            codes.push(code);
        }
        codes.sort();
        codes.concat()
    }
}

fn centres(adj: &[Vec<usize>], comp: &[usize]) -> Vec<usize> {
    if comp.len() <= 2 {
        return comp.to_vec();
    }
    let mut deg: HashMap<usize, usize> = comp.iter().map(|&v| (v, adj[v].len())).collect();
    let mut layer: Vec<usize> = comp.iter().copied().filter(|v| deg[v] <= 1).collect();
    let mut remaining = comp.len();
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in &adj[leaf] {
                let d = deg.get_mut(&w).expect("neighbour in component");
                if *d > 0 {
                    *d -= 1;
                    if *d == 1 {
                        next.push(w);
                    }
                }
            }
            deg.insert(leaf, 0);
        }
        layer = next;
    }
    layer
}

fn ahu(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| ahu(adj, w, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Homomorphism density `t(F, W)` of a forest `F`.
pub fn hom_density(f: &SimpleGraph, w: &Graphon) -> Result<f64> {
    if !f.is_forest() {
        return Err(Error::Unsupported("homomorphism density is only implemented for forests".into()));
    }
    Ok(match w {
        Graphon::Constant(c) => c.powi(f.edge_count() as i32),
        Graphon::Product(p) => f.degrees().into_iter().map(|d| p.power_integral(d)).product(),
        Graphon::Step(s) => step_forest_density(f, s),
    })
}

// Leaf-to-root message passing: msg_v(b) = Π_children (1/n) Σ_b' W(b,b') msg_c(b').
fn step_forest_density(f: &SimpleGraph, s: &StepGraphon) -> f64 {
    let n = s.n;
    let adj = f.adjacency();
    let mut visited = vec![false; f.vertex_count()];
    let mut msg = vec![Vec::new(); f.vertex_count()];
    let mut density = 1.0;
    for root in 0..f.vertex_count() {
        if visited[root] {
            continue;
        }
        let mut order = vec![(root, usize::MAX)];
        visited[root] = true;
        let mut k = 0;
        while k < order.len() {
            let (v, _) = order[k];
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    order.push((w, v));
                }
            }
            k += 1;
        }
        for &(v, parent) in order.iter().rev() {
            let mut m = vec![1.0; n];
            for &c in adj[v].iter().filter(|&&c| c != parent) {
                let child: &Vec<f64> = &msg[c];
                for (b, mb) in m.iter_mut().enumerate() {
                    let row = &s.values[b * n..(b + 1) * n];
                    let sum: f64 = row.iter().zip(child).map(|(x, y)| x * y).sum();
                    *mb *= sum / n as f64;
                }
            }
            msg[v] = m;
        }
        density *= msg[root].iter().sum::<f64>() / n as f64;
    }
    density
}
