//! Homomorphism densities of small trees in the three graphon shapes.

use graphon_laplacian::graphon::empirical_graphon;
use graphon_laplacian::{hom_density, Graphon, Profile, SimpleGraph};

fn main() -> graphon_laplacian::Result<()> {
    let graphons = [
        ("constant 1/2", Graphon::constant(0.5)?),
        ("sqrt(xy)", Graphon::product(Profile::Sqrt)?),
        ("two-block", empirical_graphon(&[vec![0.9, 0.1], vec![0.1, 0.5]])?),
    ];
    let shapes = [
        ("edge", SimpleGraph::path(2)),
        ("path P3", SimpleGraph::path(3)),
        ("path P4", SimpleGraph::path(4)),
        ("star K1,3", SimpleGraph::star(3)),
    ];

    print!("{:<12}", "");
    for (name, _) in &shapes {
        print!("{name:>12}");
    }
    println!();
    for (wname, w) in &graphons {
        print!("{wname:<12}");
        for (_, f) in &shapes {
            print!("{:>12.6}", hom_density(f, w)?);
        }
        println!();
    }

    // cycles are outside the tree-only density routines
    let triangle = SimpleGraph::new(3, [(0, 1), (1, 2), (2, 0)])?;
    println!("triangle: {}", hom_density(&triangle, &graphons[0].1).unwrap_err());
    Ok(())
}
