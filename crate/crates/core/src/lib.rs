//! Transfer-matrix optics and collective optomechanical coupling for arrays
//! of thin polarizable scatterers inside a Fabry-Perot cavity.
//!
//! Lengths are expressed in units of the reference wavelength `λ0` and
//! wavenumbers in radians per `λ0`, so the reference wavenumber is `2π`.
//! Physical units (metres, rad/s) only appear at the edges: cavity frequencies,
//! zero-point spreads and coupling rates.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod constants;
pub mod coupling;
pub mod error;
pub mod plate;
pub mod robustness;
pub mod roots;
pub mod superscatterer;
pub mod tmm;

pub use error::{Error, Result};
