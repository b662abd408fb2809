//! Site percolation on the square lattice and its two triangular embeddings.
//!
//! - [`lattice`]: coordinates, neighborhoods, arcs and balls.
//! - [`count`]: exact up-step path counts with a brute-force oracle.
//! - [`bound`]: log-space first-moment threshold probabilities.
//! - [`sim`]: seeded Monte Carlo engine with union-find connectivity.
//! - [`validate`]: the embedded invariant suite behind `perclab validate`.
//! - [`report`]: CSV/JSON emission and run manifests.

pub mod bound;
pub mod count;
pub mod error;
pub mod lattice;
pub mod report;
pub mod sim;
pub mod validate;

pub use error::{Error, Result};
pub use lattice::{LatticeVariant, Sign, Vertex};
