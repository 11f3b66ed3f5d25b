//! Rooted planar trees, `{A, Y}` words and the leaf-attachment construction
//! behind the Laplacian moment formula.
//!
//! Trees are encoded by Dyck words (`(` = step away from the root). Vertices
//! are numbered in depth-first preorder, so the root is vertex 0 and the
//! depth-first closed walk starts and ends there.

use std::fmt;
use std::str::FromStr;

use crate::error::{validation, Error, Result};
use crate::graphon::SimpleGraph;

/// Largest edge count accepted by [`enumerate_trees`].
pub const MAX_TREE_EDGES: usize = 12;
/// Largest word length accepted by [`enumerate_words`].
pub const MAX_WORD_LENGTH: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedPlanarTree {
    dyck: Vec<bool>,
    children: Vec<Vec<usize>>,
    dfs_walk: Vec<usize>,
}

impl RootedPlanarTree {
    /// Builds a tree from its Dyck word; `true` is an up-step.
    pub fn from_dyck(dyck: Vec<bool>) -> Result<Self> {
        let mut children = vec![Vec::new()];
        let mut stack = vec![0usize];
        let mut walk = vec![0usize];
        for &up in &dyck {
            if up {
                let v = children.len();
                children.push(Vec::new());
                let parent = *stack.last().expect("stack holds the root");
                children[parent].push(v);
                stack.push(v);
                walk.push(v);
            } else {
                if stack.len() == 1 {
                    return Err(validation("Dyck word has a negative prefix"));
                }
                stack.pop();
                walk.push(*stack.last().expect("root remains"));
            }
        }
        if stack.len() != 1 {
            return Err(validation("Dyck word is not balanced"));
        }
        Ok(Self { dyck, children, dfs_walk: walk })
    }

    pub fn edge_count(&self) -> usize {
        self.dyck.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.children.len()
    }

    pub fn dyck(&self) -> &[bool] {
        &self.dyck
    }

    /// Ordered children of every vertex.
    pub fn children(&self) -> &[Vec<usize>] {
        &self.children
    }

    /// Closed depth-first walk `i_1 … i_{2k+1}` with `i_{2k+1} = i_1`.
    pub fn dfs_walk(&self) -> &[usize] {
        &self.dfs_walk
    }

    pub fn to_graph(&self) -> SimpleGraph {
        let edges = self.children.iter().enumerate().flat_map(|(p, cs)| cs.iter().map(move |&c| (p, c)));
        SimpleGraph::new(self.vertex_count(), edges).expect("trees are simple graphs")
    }
}

impl fmt::Display for RootedPlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &up in &self.dyck {
            f.write_str(if up { "(" } else { ")" })?;
        }
        Ok(())
    }
}

impl FromStr for RootedPlanarTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dyck = s
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                other => Err(validation(format!("unexpected character {other:?} in Dyck string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_dyck(dyck)
    }
}

/// All rooted planar trees with `k` edges in lexicographic Dyck order (`(` < `)`).
pub fn enumerate_trees(k: usize) -> Result<Vec<RootedPlanarTree>> {
    if k > MAX_TREE_EDGES {
        return Err(Error::Capacity(format!("tree enumeration is capped at {MAX_TREE_EDGES} edges, got {k}")));
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(2 * k);
    dyck_words(k, 0, 0, &mut word, &mut out);
    Ok(out.into_iter().map(|d| RootedPlanarTree::from_dyck(d).expect("generated words are Dyck")).collect())
}

fn dyck_words(k: usize, open: usize, close: usize, word: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    if close == k {
        out.push(word.clone());
        return;
    }
    if open < k {
        word.push(true);
        dyck_words(k, open + 1, close, word, out);
        word.pop();
    }
    if close < open {
        word.push(false);
        dyck_words(k, open, close + 1, word, out);
        word.pop();
    }
}

/// Catalan number `C_k`.
pub fn catalan(k: usize) -> u64 {
    (0..k).fold(1u64, |c, i| c * 2 * (2 * i as u64 + 1) / (i as u64 + 2))
}

/// A word over `{A, Y}`: one term of the non-commutative expansion of `(A + Y)^{2k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaplacianWord {
    // bit p set ⇔ letter p is Y
    bits: u32,
    len: u8,
}

impl LaplacianWord {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_y(&self, position: usize) -> bool {
        self.bits >> position & 1 == 1
    }

    /// Total number of `A` letters (`m`).
    pub fn a_count(&self) -> usize {
        self.len() - self.y_count()
    }

    /// Total number of `Y` letters.
    pub fn y_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Canonical run-length pairs `(m_1, n_1), (m_2, n_2), …`: an `A`-run
    /// followed by a `Y`-run. Only `m_1` and the last `n` may be zero.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        let mut p = 0;
        let len = self.len();
        while p < len {
            let mut m = 0;
            while p < len && !self.is_y(p) {
                m += 1;
                p += 1;
            }
            let mut n = 0;
            while p < len && self.is_y(p) {
                n += 1;
                p += 1;
            }
            out.push((m, n));
        }
        out
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut letters = String::new();
        for &(m, n) in pairs {
            letters.extend(std::iter::repeat('A').take(m));
            letters.extend(std::iter::repeat('Y').take(n));
        }
        letters.parse()
    }
}

impl fmt::Display for LaplacianWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.len() {
            f.write_str(if self.is_y(p) { "Y" } else { "A" })?;
        }
        Ok(())
    }
}

impl FromStr for LaplacianWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 32 {
            return Err(validation("words are limited to 32 letters"));
        }
        let mut bits = 0u32;
        for (p, c) in s.chars().enumerate() {
            match c {
                'A' => {}
                'Y' => bits |= 1 << p,
                other => return Err(validation(format!("unexpected letter {other:?}; words use A and Y"))),
            }
        }
        Ok(Self { bits, len: s.chars().count() as u8 })
    }
}

/// All `2^{2k}` words of length `two_k`, in lexicographic order (`A` < `Y`).
pub fn enumerate_words(two_k: usize) -> Result<Vec<LaplacianWord>> {
    if two_k % 2 == 1 {
        return Err(validation(format!("word length must be even, got {two_k}")));
    }
    if two_k > MAX_WORD_LENGTH {
        return Err(validation(format!("word length {two_k} exceeds {MAX_WORD_LENGTH}")));
    }
    Ok((0u32..1 << two_k)
        .map(|v| {
            let bits = if two_k == 0 { 0 } else { v.reverse_bits() >> (32 - two_k) };
            LaplacianWord { bits, len: two_k as u8 }
        })
        .collect())
}

/// A base tree with `leaf_mult[s]` extra leaves hanging off vertex `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifiedTree {
    pub base: RootedPlanarTree,
    pub leaf_mult: Vec<usize>,
    /// False when some vertex collects an odd number of `Y` letters.
    pub valid: bool,
}

impl ModifiedTree {
    /// The modified tree as a graph: base vertices first, then the attached
    /// leaves. `None` when the parity condition fails.
    pub fn to_graph(&self) -> Option<SimpleGraph> {
        if !self.valid {
            return None;
        }
        let base_n = self.base.vertex_count();
        let mut edges: Vec<(usize, usize)> = self.base.to_graph().edges().to_vec();
        let mut next = base_n;
        for (s, &k) in self.leaf_mult.iter().enumerate() {
            for _ in 0..k {
                edges.push((s, next));
                next += 1;
            }
        }
        Some(SimpleGraph::new(next, edges).expect("leaf attachment keeps a tree"))
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count() + self.leaf_mult.iter().sum::<usize>()
    }
}

/// Attaches the `Y`-runs of `word` to the tree vertices visited by the
/// depth-first walk: the run `n_j` lands on walk position `Σ_{p≤j} m_p`
/// (position `m` is the root again). A vertex collecting `2h` letters gets
/// `h` leaves.
pub fn modify_tree(tree: &RootedPlanarTree, word: &LaplacianWord) -> Result<ModifiedTree> {
    let m = word.a_count();
    if m != 2 * tree.edge_count() {
        return Err(validation(format!(
            "word has {m} A letters but the tree has {} edges (needs {})",
            tree.edge_count(),
            2 * tree.edge_count()
        )));
    }
    let walk = tree.dfs_walk();
    let mut collected = vec![0usize; tree.vertex_count()];
    let mut position = 0;
    for (m_j, n_j) in word.pairs() {
        position += m_j;
        let vertex = walk[if position == m { 0 } else { position }];
        collected[vertex] += n_j;
    }
    let valid = collected.iter().all(|c| c % 2 == 0);
    let leaf_mult = if valid { collected.iter().map(|c| c / 2).collect() } else { vec![0; tree.vertex_count()] };
    Ok(ModifiedTree { base: tree.clone(), leaf_mult, valid })
}

/// `E[Z^t]` for a standard Gaussian: 0 for odd `t`, `(t-1)!!` for even `t`.
pub fn gaussian_moment(t: usize) -> f64 {
    if t % 2 == 1 {
        return 0.0;
    }
    (1..t).step_by(2).map(|v| v as f64).product()
}

/// Gaussian weight of a modified tree: `Π_s E[Z^{2 n̂_s}]`, or 0 when the
/// parity condition fails.
pub fn f_value(tree: &ModifiedTree) -> f64 {
    if !tree.valid {
        return 0.0;
    }
    tree.leaf_mult.iter().map(|&h| gaussian_moment(2 * h)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_dyck_count(k: usize) -> usize {
        (0u32..1 << (2 * k))
            .filter(|w| {
                let mut h = 0i32;
                for p in 0..2 * k {
                    h += if w >> p & 1 == 1 { 1 } else { -1 };
                    if h < 0 {
                        return false;
                    }
                }
                h == 0
            })
            .count()
    }

    #[test]
    fn tree_counts() {
        assert_eq!(enumerate_trees(0).unwrap().len(), 1);
        assert_eq!(enumerate_trees(3).unwrap().len(), brute_force_dyck_count(3));
        assert_eq!(enumerate_trees(3).unwrap().len(), 5);
        // Catalan recurrence C_{n+1} = Σ C_i C_{n-i}
        let mut c = vec![1u64];
        for n in 0..10 {
            c.push((0..=n).map(|i| c[i] * c[n - i]).sum());
        }
        assert_eq!(enumerate_trees(10).unwrap().len() as u64, c[10]);
        assert_eq!(c[10], 16796);
        assert!(matches!(enumerate_trees(13), Err(Error::Capacity(_))));
    }

    #[test]
    fn trees_are_in_lexicographic_order() {
        let names: Vec<String> = enumerate_trees(3).unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(names, ["((()))", "(()())", "(())()", "()(())", "()()()"]);
    }

    #[test]
    fn dyck_parsing_rejects_bad_words() {
        assert!("())(".parse::<RootedPlanarTree>().is_err());
        assert!("((".parse::<RootedPlanarTree>().is_err());
        assert!("(x)".parse::<RootedPlanarTree>().is_err());
    }

    #[test]
    fn walk_of_example_tree() {
        // root 1 — vertex 2, which carries leaves 3 and 4
        let t: RootedPlanarTree = "(()())".parse().unwrap();
        assert_eq!(t.dfs_walk(), &[0, 1, 2, 1, 3, 1, 0]);
        assert_eq!(t.vertex_count(), 4);
    }

    #[test]
    fn word_enumeration() {
        let w2: Vec<String> = enumerate_words(2).unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(w2, ["AA", "AY", "YA", "YY"]);
        let pairs: Vec<Vec<(usize, usize)>> = enumerate_words(2).unwrap().iter().map(|w| w.pairs()).collect();
        assert_eq!(pairs, vec![vec![(2, 0)], vec![(1, 1)], vec![(0, 1), (1, 0)], vec![(0, 2)]]);
        assert_eq!(enumerate_words(0).unwrap().len(), 1);
        let w4 = enumerate_words(4).unwrap();
        assert_eq!(w4.len(), 16);
        assert_eq!(w4.iter().filter(|w| w.a_count() % 2 == 0).count(), 8);
        assert!(enumerate_words(3).is_err());
        assert!(enumerate_words(22).is_err());
    }

    #[test]
    fn worked_modification_example() {
        // m = (2,2,0,2), n = (2,2,0,0,2) ⇒ word AAYY AAYY AA YY
        let word: LaplacianWord = "AAYYAAYYAAYY".parse().unwrap();
        let tree: RootedPlanarTree = "(()())".parse().unwrap();
        let mt = modify_tree(&tree, &word).unwrap();
        assert!(mt.valid);
        assert_eq!(mt.leaf_mult, vec![1, 0, 1, 1]);
        assert_eq!(mt.vertex_count(), 7);
        assert_eq!(f_value(&mt), 1.0);
    }

    #[test]
    fn pure_adjacency_word_leaves_tree_unchanged() {
        let tree: RootedPlanarTree = "()".parse().unwrap();
        let mt = modify_tree(&tree, &"AA".parse().unwrap()).unwrap();
        assert_eq!(mt.leaf_mult, vec![0, 0]);
        assert_eq!(mt.to_graph().unwrap(), tree.to_graph());
    }

    #[test]
    fn all_y_word_collapses_onto_root() {
        let tree: RootedPlanarTree = "".parse().unwrap();
        let mt = modify_tree(&tree, &"YYYY".parse().unwrap()).unwrap();
        assert_eq!(mt.leaf_mult, vec![2]);
        assert_eq!(mt.to_graph().unwrap().canonical_form(), SimpleGraph::star(2).canonical_form());
        assert_eq!(f_value(&mt), 3.0);
    }

    #[test]
    fn parity_violation() {
        let tree: RootedPlanarTree = "()".parse().unwrap();
        let mt = modify_tree(&tree, &"AYAY".parse().unwrap()).unwrap();
        assert!(!mt.valid);
        assert_eq!(f_value(&mt), 0.0);
        assert!(mt.to_graph().is_none());
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let tree: RootedPlanarTree = "(())".parse().unwrap();
        assert!(modify_tree(&tree, &"AAYY".parse().unwrap()).is_err());
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_moment(2), 1.0);
        assert_eq!(gaussian_moment(4), 3.0);
        let mut df = 1.0;
        for t in (2..=40).step_by(2) {
            df *= (t - 1) as f64;
            assert_eq!(gaussian_moment(t), df);
            assert_eq!(gaussian_moment(t - 1), 0.0);
        }
        assert_eq!(gaussian_moment(6), 15.0);
        assert_eq!(gaussian_moment(0), 1.0);
    }

    #[test]
    fn word_parsing() {
        let w: LaplacianWord = "YAAY".parse().unwrap();
        assert_eq!(w.pairs(), vec![(0, 1), (2, 1)]);
        assert_eq!(LaplacianWord::from_pairs(&w.pairs()).unwrap(), w);
        assert!("AB".parse::<LaplacianWord>().is_err());
    }

    #[test]
    fn catalan_numbers() {
        let expected = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012];
        for (k, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(k), c);
        }
    }
}
