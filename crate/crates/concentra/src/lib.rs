//! Concentration inequalities for empirical processes over finite ground
//! spaces: closed-form bound evaluators, the convex-hull distance on the
//! discrete cube, symmetrization machinery, chaining constructions, and an
//! exact-enumeration / Monte Carlo harness that certifies every inequality
//! at desk scale.

pub mod bounds;
pub mod chaining;
pub mod cli;
pub mod cube;
pub mod error;
pub mod process;
pub mod symmetrization;
pub mod verify;

pub use error::{Error, Result};
