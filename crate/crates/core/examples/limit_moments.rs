//! Limiting moments of the adjacency, Laplacian and diagonal spectra.

use graphon_laplacian::graphon::empirical_graphon;
use graphon_laplacian::moments::{laplacian_terms, moment_table};
use graphon_laplacian::{Graphon, MomentSource, Profile};

fn main() -> graphon_laplacian::Result<()> {
    let graphons = [
        ("W = 1", Graphon::Constant(1.0)),
        ("W = sqrt(xy)", Graphon::product(Profile::Sqrt)?),
        ("W = xy", Graphon::product(Profile::Identity)?),
        ("two-block", empirical_graphon(&[vec![1.0, 0.2], vec![0.2, 0.6]])?),
    ];
    let orders = [2, 4, 6, 8];
    for (name, w) in &graphons {
        println!("{name}");
        for source in [MomentSource::Adjacency, MomentSource::Laplacian, MomentSource::Yn] {
            let table = moment_table(&orders, w, source)?;
            let row: Vec<String> = table.moments.values().map(|m| format!("{m:>10.5}")).collect();
            println!("  {:<10} {}", format!("{source:?}"), row.join(""));
        }
    }

    println!("\nfourth Laplacian moment as a sum over modified trees:");
    for term in laplacian_terms(4)?.iter() {
        println!("  {:>4} × t({})", term.coefficient, term.graph.canonical_form());
    }
    Ok(())
}
