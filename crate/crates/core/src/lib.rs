//! Explicit lower bounds on the volume of hyperbolic `n`-orbifolds whose
//! torsion has order at most `k`, the group-order bounds that follow from
//! them, and a seeded harness that checks every supporting inequality on
//! random isometries.

pub mod bounds;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod logspace;
pub mod lorentz;
mod quadrature;
pub mod verify;

pub use error::{Error, Result};
