//! Limiting even moments of the adjacency, Laplacian and diagonal (`Y_N`) spectra.
//!
//! The Laplacian moments expand `(A + Y)^{2k}` word by word. Every word
//! with an even number `m` of `A` letters pairs with each rooted planar tree
//! on `m/2 + 1` vertices; the resulting modified tree contributes its
//! homomorphism density times a product of Gaussian moments. The graphon
//! enters only through the densities, so the coefficient table (one entry
//! per unlabeled modified tree) is built once per order and cached.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::graphon::{hom_density, Graphon, SimpleGraph};
use crate::trees::{enumerate_trees, enumerate_words, f_value, gaussian_moment, modify_tree, LaplacianWord};

/// Highest even order for adjacency and `Y_N` moments.
pub const MAX_ADJACENCY_ORDER: usize = 20;
/// Highest even order for Laplacian moments (cost `2^{2k} · C_k`).
pub const MAX_LAPLACIAN_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentSource {
    Adjacency,
    Laplacian,
    Yn,
    Empirical,
    Freeconv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub source: MomentSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphon: Option<Graphon>,
    pub moments: BTreeMap<usize, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<ReportMetadata>,
}

/// A forest with the total weight of the word/tree pairs producing it.
#[derive(Debug, Clone)]
pub struct TreeTerm {
    pub graph: SimpleGraph,
    pub coefficient: f64,
}

fn check_even_order(two_k: usize, cap: usize) -> Result<()> {
    if two_k > cap {
        return Err(Error::Capacity(format!("moment order {two_k} exceeds the supported maximum {cap}")));
    }
    Ok(())
}

/// Pairwise summation, to keep rounding error at O(log n).
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

fn evaluate(terms: &[TreeTerm], w: &Graphon) -> Result<f64> {
    let values = terms
        .iter()
        .map(|t| Ok(t.coefficient * hom_density(&t.graph, w)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&values))
}

fn group(terms: impl Iterator<Item = (SimpleGraph, f64)>) -> Vec<TreeTerm> {
    let mut by_shape: BTreeMap<String, TreeTerm> = BTreeMap::new();
    for (graph, coefficient) in terms {
        by_shape
            .entry(graph.canonical_form())
            .and_modify(|t| t.coefficient += coefficient)
            .or_insert(TreeTerm { graph, coefficient });
    }
    by_shape.into_values().collect()
}

type TermCache = Mutex<HashMap<usize, Arc<Vec<TreeTerm>>>>;

fn cached(cache: &'static OnceLock<TermCache>, order: usize, build: impl FnOnce() -> Result<Vec<TreeTerm>>) -> Result<Arc<Vec<TreeTerm>>> {
    let cache = cache.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("term cache poisoned").get(&order) {
        return Ok(hit.clone());
    }
    let terms = Arc::new(build()?);
    cache.lock().expect("term cache poisoned").insert(order, terms.clone());
    Ok(terms)
}

/// Planar trees with `two_k / 2` edges grouped by unlabeled shape.
pub fn adjacency_terms(two_k: usize) -> Result<Arc<Vec<TreeTerm>>> {
    static CACHE: OnceLock<TermCache> = OnceLock::new();
    check_even_order(two_k, MAX_ADJACENCY_ORDER)?;
    if two_k % 2 == 1 {
        return Ok(Arc::new(Vec::new()));
    }
    cached(&CACHE, two_k, || Ok(group(enumerate_trees(two_k / 2)?.into_iter().map(|t| (t.to_graph(), 1.0)))))
}

/// Modified trees of order `two_k` grouped by unlabeled shape, weighted by
/// the summed Gaussian factors.
pub fn laplacian_terms(two_k: usize) -> Result<Arc<Vec<TreeTerm>>> {
    static CACHE: OnceLock<TermCache> = OnceLock::new();
    check_even_order(two_k, MAX_LAPLACIAN_ORDER)?;
    if two_k % 2 == 1 {
        return Ok(Arc::new(Vec::new()));
    }
    cached(&CACHE, two_k, || {
        let trees_by_edges = (0..=two_k / 2).map(enumerate_trees).collect::<Result<Vec<_>>>()?;
        let mut raw = Vec::new();
        for word in enumerate_words(two_k)? {
            let m = word.a_count();
            if m % 2 == 1 {
                continue;
            }
            for tree in &trees_by_edges[m / 2] {
                let mt = modify_tree(tree, &word)?;
                if let Some(graph) = mt.to_graph() {
                    raw.push((graph, f_value(&mt)));
                }
            }
        }
        Ok(group(raw.into_iter()))
    })
}

/// `∫ x^{2k} dμ`: sum of tree densities over all planar trees with `k` edges.
/// Odd orders are 0.
pub fn adjacency_moment(two_k: usize, w: &Graphon) -> Result<f64> {
    if two_k % 2 == 1 {
        return Ok(0.0);
    }
    evaluate(&adjacency_terms(two_k)?, w)
}

/// `∫ x^{2k} dν` for the centered, scaled Laplacian. Odd orders are 0.
pub fn laplacian_moment(two_k: usize, w: &Graphon) -> Result<f64> {
    if two_k % 2 == 1 {
        return Ok(0.0);
    }
    evaluate(&laplacian_terms(two_k)?, w)
}

/// Contribution of a single word to the Laplacian moment of its length.
pub fn laplacian_word_contribution(word: &LaplacianWord, w: &Graphon) -> Result<f64> {
    let m = word.a_count();
    if m % 2 == 1 {
        return Ok(0.0);
    }
    let mut total = Vec::new();
    for tree in enumerate_trees(m / 2)? {
        let mt = modify_tree(&tree, word)?;
        if let Some(graph) = mt.to_graph() {
            total.push(f_value(&mt) * hom_density(&graph, w)?);
        }
    }
    Ok(pairwise_sum(&total))
}

/// Moments of the diagonal matrix `Y_N`: `E[Z^k] · t(star with k/2 leaves, W)`.
pub fn yn_moment(k: usize, w: &Graphon) -> Result<f64> {
    check_even_order(k, MAX_ADJACENCY_ORDER)?;
    if k % 2 == 1 {
        return Ok(0.0);
    }
    Ok(gaussian_moment(k) * hom_density(&SimpleGraph::star(k / 2), w)?)
}

/// Theoretical moment table for the requested orders.
pub fn moment_table(orders: &[usize], w: &Graphon, source: MomentSource) -> Result<MomentReport> {
    let mut moments = BTreeMap::new();
    for &k in orders {
        let value = match source {
            MomentSource::Adjacency => {
                check_even_order(k, MAX_ADJACENCY_ORDER)?;
                adjacency_moment(k, w)?
            }
            MomentSource::Laplacian => {
                if k % 2 == 0 {
                    check_even_order(k, MAX_LAPLACIAN_ORDER)?;
                }
                laplacian_moment(k, w)?
            }
            MomentSource::Yn => yn_moment(k, w)?,
            MomentSource::Freeconv => {
                let Graphon::Constant(c) = w else {
                    return Err(Error::Unsupported(
                        "free-convolution moments are only available for constant graphons".into(),
                    ));
                };
                crate::freeconv::gamma_m_numeric_moment(k)? * c.powf(k as f64 / 2.0)
            }
            MomentSource::Empirical => {
                return Err(validation("empirical moments come from spectral samples, not graphons"))
            }
        };
        moments.insert(k, value);
    }
    Ok(MomentReport { source, graphon: Some(w.clone()), moments, metadata: None })
}
