//! Chain complexes of triangulated spaces and their finite covers, Hodge and
//! Whitney Laplacian spectra, least-norm fillings of null-homologous cycles,
//! and evaluators for explicit spectral inequalities on hyperbolic manifolds.

pub mod bounds;
pub mod cli;
pub mod complex;
pub mod covers;
pub mod error;
pub mod exact;
pub mod graph;
pub mod homology;
pub mod hyperbolic;
pub mod io;
pub mod lp;
pub mod scl;
pub mod spectra;
pub mod triangulations;
pub mod whitney;

pub use complex::{SimplicialComplex, SparseIntMatrix};
pub use error::{Error, Result};
