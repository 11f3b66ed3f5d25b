//! Eigenvalue histogram of a centered, scaled inhomogeneous Erdős–Rényi
//! Laplacian with f(x,y) = √(xy), N = 1000, ε = 0.25.

use graphon_laplacian::spectral::Histogram;
use graphon_laplacian::{laplacian_moment, EnsembleSpec, Graphon, Model, Profile, SpectralSample};

fn main() -> graphon_laplacian::Result<()> {
    let f = Graphon::product(Profile::Sqrt)?;
    let spec = EnsembleSpec::new(Model::InhomEr { f: f.clone(), eps: 0.25 }, 1000, 7)?;
    let sample = SpectralSample::from_spec(&spec)?;
    println!("m1 = {:+.4} ± {:.4}", sample.moment(1), sample.moment_standard_error(1));
    println!("m2 = {:.4} (moment formula with W = f: {:.4})", sample.moment(2), laplacian_moment(2, &f)?);
    println!("m3 = {:+.4} ± {:.4}", sample.moment(3), sample.moment_standard_error(3));

    let hist = Histogram::new(&sample.eigenvalues, 30, (-3.0, 3.0))?;
    let peak = *hist.counts.iter().max().unwrap_or(&1) as f64;
    for (b, &c) in hist.counts.iter().enumerate() {
        let bar = "#".repeat((50.0 * c as f64 / peak).round() as usize);
        println!("{:>6.2} {bar}", 0.5 * (hist.edges[b] + hist.edges[b + 1]));
    }
    Ok(())
}
