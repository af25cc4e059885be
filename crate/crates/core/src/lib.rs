//! Partition-function estimation for two-dimensional nearest-neighbor spin
//! models on a torus, by sampling either the primal factor graph or its
//! Fourier dual.
//!
//! The primal graph weights each bond by a shift-invariant kernel `kappa`; the
//! dual weights each bond by the normalized transform `kappa^ / q` and
//! restricts bond configurations to the parity (cycle) support. Their
//! partition functions satisfy `Z_dual = Z_primal / q^N`, and sampling-based
//! estimators on the two sides behave in opposite ways as the inverse
//! temperature grows.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod harness;
pub mod lattice;
pub mod model;
pub mod sampler;
pub mod zq;

pub use error::{Error, Result};
pub use estimators::{EstimateSeries, EstimatorKind};
pub use lattice::TorusLattice;
pub use model::{KernelKind, ModelSpec, Representation};
