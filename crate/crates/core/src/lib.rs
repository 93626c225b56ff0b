//! Continuous crystals attached to finite Coxeter groups.
//!
//! Paths are piecewise linear in the essential realization of the group. On top of the
//! path operators the crate builds string coordinates, Schützenberger-type involutions,
//! Duistermaat-Heckman measures with Monte Carlo checks, and tropical/geometric lifts.

pub mod coxeter;
pub mod crystal;
pub mod dh;
pub mod error;
pub mod involutions;
pub mod plpath;
pub mod selftest;
pub mod stringparam;
pub mod transforms;
pub mod troplift;

pub use coxeter::{GroupSpec, Realization, Word};
pub use error::{Error, Result};
pub use plpath::{PlPath, ScalarPl};
