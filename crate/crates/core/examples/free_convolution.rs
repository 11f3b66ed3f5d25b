//! Density of the semicircle ⊞ Gaussian law, its moments, and the
//! free-cumulant check of the same moments.

use std::time::Instant;

use graphon_laplacian::freeconv::{default_density, gamma_m_free_cumulants, moments_from_free_cumulants};
use graphon_laplacian::{laplacian_moment, Graphon};

fn main() -> graphon_laplacian::Result<()> {
    let start = Instant::now();
    let curve = default_density()?;
    println!("density on {} points in {:.2?}", curve.xs.len(), start.elapsed());
    println!("mass = {:.6}", curve.mass());

    let asym = curve
        .density
        .iter()
        .zip(curve.density.iter().rev())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |ρ(x) - ρ(-x)| = {asym:.2e}");

    let kappa = gamma_m_free_cumulants(6);
    println!("free cumulants κ2, κ4, κ6 = {}, {}, {}", kappa[2], kappa[4], kappa[6]);
    println!("{:>3} {:>12} {:>12} {:>12}", "k", "trees", "cumulants", "density");
    for k in [2, 4, 6] {
        println!(
            "{k:>3} {:>12.6} {:>12.6} {:>12.6}",
            laplacian_moment(k, &Graphon::Constant(1.0))?,
            moments_from_free_cumulants(&kappa, k),
            curve.moment(k)
        );
    }
    Ok(())
}
