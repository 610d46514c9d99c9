//! Alloys, cross-projective representations and quaternary algebras.
//!
//! The crate is organized bottom-up:
//!
//! * [`numkernel`]: dense complex linear algebra and the tolerance policy.
//! * [`algebra`]: anticommutative and quaternary algebras, `Λ²` constructions.
//! * [`alloy`]: alloys, cross-projective representations, alloyability.
//! * [`rep`]: representations of alloys, irreducibility and decomposition.
//! * [`asl2`]: the four-dimensional alloy `asl(2, C)` and its representations.
//! * [`io`]: the JSON file formats.

pub mod algebra;
pub mod alloy;
pub mod asl2;
pub mod error;
pub mod io;
pub mod numkernel;
pub mod random;
pub mod rep;

pub use error::{Error, Result};
pub use numkernel::{CMatrix, CVector, ToleranceConfig, C64};
