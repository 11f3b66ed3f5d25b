//! Cut norm and cut distance between step graphons.

use graphon_laplacian::graphon::{
    cut_distance_step, cut_norm_exact, cut_norm_heuristic, empirical_graphon, l1_distance, PermutationSearch,
};
use graphon_laplacian::{Graphon, StepGraphon, StepKernel};

fn main() -> graphon_laplacian::Result<()> {
    let rows = vec![
        vec![0.9, 0.2, 0.1, 0.0],
        vec![0.2, 0.7, 0.3, 0.1],
        vec![0.1, 0.3, 0.5, 0.4],
        vec![0.0, 0.1, 0.4, 0.8],
    ];
    let w = empirical_graphon(&rows)?;
    let perm = [2, 0, 3, 1];
    let Graphon::Step(step) = &w else { unreachable!() };
    let relabeled = Graphon::Step(step.permuted(&perm));

    println!("L1 distance before alignment: {:.4}", l1_distance(&w, &relabeled));
    let d = cut_distance_step(&w, &relabeled, PermutationSearch::Auto)?;
    println!("cut distance {:.3e} via permutation {:?} (exhaustive: {})", d.value, d.permutation, d.exhaustive);

    let kernel = StepKernel::difference(step, &StepGraphon::new(4, vec![0.4; 16])?)?;
    println!("‖W - 0.4‖_□ exact     = {:.6}", cut_norm_exact(&kernel)?);
    println!("‖W - 0.4‖_□ heuristic = {:.6}", cut_norm_heuristic(&kernel, 32, 1));
    Ok(())
}
