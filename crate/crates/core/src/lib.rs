//! Divisor-lattice combinatorics of exceptional collections of line bundles
//! on rational surfaces: toric systems, admissible sequences,
//! left-orthogonality on weak del Pezzo surfaces, anticanonical
//! pseudoheight and spherical-twist reduction.

pub mod admissible;
pub mod catalog;
pub mod error;
pub mod lattice;
pub mod pseudoheight;
pub mod surface;
pub mod tables;
pub mod toric;
pub mod twist;

pub use error::{Error, Result};
pub use lattice::{DivisorClass, HirzebruchKind, LatticeId, PicardLattice};
pub use surface::{LoSloStatus, SurfaceModel};
pub use toric::{ExceptionalityReport, Segment, ToricSystem};
