//! Analysis toolkit for typed pure simplicial complexes viewed as partite
//! hypergraphs: discrepancy, spectra of the type-induced vertex-versus-wall
//! bipartite graphs, explicit spectral-gap constant chains, and empirical
//! geometric overlap of embeddings into R^d.
//!
//! Module map:
//! - [`complex`]: the data model (typed complexes, walls, validation,
//!   type regularity).
//! - [`bipartite`]: incidence graphs and the left-side walk metric.
//! - [`generators`]: complete partite, projective flag, and random families.
//! - [`spectral`]: normalized second eigenvalues, distance operators, and
//!   exact walk decompositions.
//! - [`discrepancy`]: exact maximization, local search, and the spectral
//!   upper bound.
//! - [`geometry`]: exact point-in-simplex predicates and overlap search.
//! - [`bounds`]: the explicit constant chain and overlap certification.
//! - [`io`]: JSON interchange for complexes and embeddings.

pub mod bipartite;
pub mod bounds;
pub mod complex;
pub mod discrepancy;
pub mod exec;
pub mod generators;
pub mod geometry;
pub mod gf;
pub mod io;
pub mod numeric;
pub mod spectral;

pub use bipartite::BipartiteGraph;
pub use complex::{TypedComplex, ValidationReport, VertexId, Wall};
pub use numeric::Rat;
