//! Spectral norm of centered Laplacians against √(2N log N), and the
//! ‖Δ_N‖/N law when the entries have a nonzero mean.

use graphon_laplacian::ensembles::{EntryLaw, VarianceRule};
use graphon_laplacian::spectral::{mean_norm_scan, norm_scan};
use graphon_laplacian::{EnsembleSpec, Graphon, Model};

fn main() -> graphon_laplacian::Result<()> {
    let wigner = |mean: f64| Model::GeneralizedWigner {
        graphon: Graphon::Constant(0.5),
        entry_law: EntryLaw::Gaussian,
        variance: VarianceRule::Grid,
        mean,
    };
    let ns = [128, 256, 512, 1024];

    let scan = norm_scan(&EnsembleSpec::new(wigner(0.0), 128, 1)?, &ns, 3)?;
    println!("bracket [{:.4}, {:.4}]", scan.bracket.0, scan.bracket.1);
    for s in &scan.summary {
        println!("N = {:>5}: median ratio {:.4} (min {:.4}, max {:.4})", s.n, s.median, s.min, s.max);
    }

    let scan = mean_norm_scan(&EnsembleSpec::new(wigner(0.3), 128, 1)?, &ns, 3)?;
    println!("\nmean 0.3: limit ‖EΔ‖/N = {:.4}", scan.limit);
    for (n, m) in &scan.medians {
        println!("N = {n:>5}: ‖Δ‖/N = {m:.4}");
    }
    Ok(())
}
