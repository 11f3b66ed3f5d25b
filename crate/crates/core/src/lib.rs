//! Limiting spectra of random matrices and random graphs whose variance
//! profile is a graphon.
//!
//! The crate pairs exact combinatorics with Monte Carlo:
//!
//! * [`graphon`] — graphons, homomorphism densities of forests, cut norm and
//!   cut distance for step kernels;
//! * [`trees`] — rooted planar trees, `{A, Y}` words and the modified trees
//!   that index the Laplacian moment expansion;
//! * [`moments`] — limiting even moments of the adjacency, Laplacian and
//!   diagonal spectra as sums of homomorphism densities;
//! * [`ensembles`] — generalized Wigner matrices, inhomogeneous and sparse
//!   `W`-random graphs, degree-constrained graphs and the two auxiliary
//!   matrix models, plus Laplacians;
//! * [`spectral`] — eigenvalues, ESD moments, Lévy/Kolmogorov–Smirnov
//!   distances, histograms and spectral-norm scans;
//! * [`freeconv`] — the free convolution of the semicircle and the Gaussian
//!   and the moment–free-cumulant transform;
//! * [`experiment`] — the JSON-configured experiment runner behind the
//!   `graphon-lab` binary.
//!
//! ```
//! use graphon_laplacian::{laplacian_moment, Graphon};
//!
//! let w = Graphon::Constant(1.0);
//! assert_eq!(laplacian_moment(2, &w).unwrap(), 2.0);
//! assert_eq!(laplacian_moment(4, &w).unwrap(), 9.0);
//! ```

pub mod ensembles;
pub mod error;
pub mod experiment;
pub mod freeconv;
pub mod graphon;
pub mod moments;
mod rng;
pub mod spectral;
pub mod trees;

pub use ensembles::{laplacian_of, EnsembleSpec, Model, SymMatrix};
pub use error::{Error, Result};
pub use freeconv::{gamma_m_density, gamma_m_stieltjes, moments_from_free_cumulants, stieltjes_gaussian};
pub use graphon::{cut_norm, hom_density, Graphon, Profile, SimpleGraph, StepGraphon, StepKernel};
pub use moments::{adjacency_moment, laplacian_moment, yn_moment, MomentReport, MomentSource};
pub use spectral::{eigenvalues_sym, esd_moments, levy_distance, spectral_norm, EmpiricalCdf, SpectralSample};
pub use trees::{enumerate_trees, enumerate_words, LaplacianWord, RootedPlanarTree};
