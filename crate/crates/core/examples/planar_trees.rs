//! Rooted planar trees, {A, Y} words and the modified trees they produce.

use graphon_laplacian::trees::{catalan, enumerate_trees, f_value, modify_tree};
use graphon_laplacian::{LaplacianWord, RootedPlanarTree};

fn main() -> graphon_laplacian::Result<()> {
    for k in 0..=10 {
        println!("k = {k:>2}: {:>6} trees (Catalan {})", enumerate_trees(k)?.len(), catalan(k));
    }

    println!("\nplanar trees with 3 edges:");
    for t in enumerate_trees(3)? {
        println!("  {t}  walk {:?}", t.dfs_walk());
    }

    let tree: RootedPlanarTree = "(()())".parse()?;
    let word: LaplacianWord = "AAYYAAYYAAYY".parse()?;
    let modified = modify_tree(&tree, &word)?;
    println!("\nword {word} on tree {tree}");
    println!("  pairs (m_j, n_j): {:?}", word.pairs());
    println!("  extra leaves per vertex: {:?}", modified.leaf_mult);
    println!("  Gaussian weight f = {}", f_value(&modified));

    // one Y lands on each endpoint of the edge: odd totals, no valid pairing
    let odd: LaplacianWord = "AYAY".parse()?;
    let single: RootedPlanarTree = "()".parse()?;
    let invalid = modify_tree(&single, &odd)?;
    println!("word {odd} on tree {single}: valid = {}", invalid.valid);
    Ok(())
}
