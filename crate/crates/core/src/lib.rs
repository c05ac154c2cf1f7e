//! Forward models and analysis tools for eddy-current testing of thin
//! conductive plates.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure numerics:
//!
//! - [`model`]: sensor and sample descriptions, constants, frequency grids.
//! - [`te_layered`]: TE plane-wave wavenumbers, Fresnel coefficients and the
//!   generalized reflection coefficient of an air/plate/air stack.
//! - [`thin_plate`]: the single-spatial-frequency plate response, its
//!   thin-sheet limit and the conductivity-thickness equivalence transform.
//! - [`dodd_deeds`]: the full axisymmetric coil-pair integral for absolute
//!   mutual-inductance changes, with a per-node kernel cache for sweeps.
//! - [`analysis`]: sweeps, spectrum comparison and sigma*D inversion.
//!
//! File formats, the CLI and multi-threaded sweeps live in the `eddyeq`
//! companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dodd_deeds;
mod error;
mod math;
pub mod model;
pub mod quadrature;
pub mod te_layered;
pub mod thin_plate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
