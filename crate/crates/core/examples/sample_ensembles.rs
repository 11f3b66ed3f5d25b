//! Draw one matrix from each ensemble and report the moments of its spectrum
//! next to the limiting values.

use graphon_laplacian::ensembles::{limit_graphon, EntryLaw, VarianceRule};
use graphon_laplacian::graphon::empirical_graphon;
use graphon_laplacian::{laplacian_moment, EnsembleSpec, Graphon, Model, Profile, SpectralSample};

fn circulant() -> Vec<Vec<f64>> {
    let g = [0.9, 0.6, 0.2, 0.6];
    (0..4).map(|i| (0..4).map(|j| g[(4 + j - i) % 4]).collect()).collect()
}

fn main() -> graphon_laplacian::Result<()> {
    let n = 800;
    let models = [
        Model::GeneralizedWigner {
            graphon: Graphon::product(Profile::Sqrt)?,
            entry_law: EntryLaw::Rademacher,
            variance: VarianceRule::Grid,
            mean: 0.0,
        },
        Model::InhomEr { f: Graphon::Constant(1.0), eps: 0.02 },
        // regular graphon: every block row sums to the same degree
        Model::SparseWRandom { graphon: empirical_graphon(&circulant())?, eps: 0.05 },
        Model::Decoupled { graphon: Graphon::Constant(1.0) },
        Model::Multiplicative { profile: Profile::Sqrt },
    ];
    println!("{:<20} {:>9} {:>9} {:>9} {:>9}", "model", "m2", "limit", "m4", "limit");
    for model in models {
        let name = serde_json::to_value(&model)?["type"].as_str().unwrap_or("?").to_string();
        let spec = EnsembleSpec::new(model, n, 2024)?;
        let sample = SpectralSample::from_spec(&spec)?;
        let w = limit_graphon(&spec.model).expect("all listed models have a graphon");
        println!(
            "{name:<20} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            sample.moment(2),
            laplacian_moment(2, &w)?,
            sample.moment(4),
            laplacian_moment(4, &w)?
        );
    }
    Ok(())
}
