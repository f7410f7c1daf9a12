//! Filling volumes, round and unfolded partitions, and divergence on finite simplicial model complexes.
//!
//! The ambient spaces are finite patches of Freudenthal-triangulated grids (and a few
//! closed test complexes). Hypersurfaces are simplicial maps from closed curves and
//! surfaces; fillings are maps from balls. Exact filling volumes on grid patches come
//! from a chain oracle that the constructive fillings are checked against.

pub mod complex;
pub mod decomposition;
pub mod divergence;
pub mod error;
pub mod filling;
pub mod harness;
pub mod hypersurface;
pub mod models;

pub use complex::{ChamberId, ChamberSet, Metric, SimplicialComplex, VertexId};
pub use error::{Error, Result};
pub use hypersurface::{FillingDomain, Hypersurface, SimplicialMap, SurfaceModel};
pub use models::{generate, Model, ModelKind, ModelSpec};
