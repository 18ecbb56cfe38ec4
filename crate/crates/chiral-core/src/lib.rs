//! Exact computations in the polysimplicial model of derived sections on
//! configuration spaces of affine space, together with the chiral residue
//! operations on the shifted canonical sheaf and their coherence identities.

pub mod error;
pub mod chiral_ops;
pub mod cohomology;
pub mod cousin;
pub mod exact_ring;
pub mod linalg;
pub mod model_p;
pub mod random;
pub mod retract;
pub mod sexpr;
pub mod simplex_forms;

pub use error::{Error, Result};
