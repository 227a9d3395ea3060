//! Thermal radiation and vacuum friction of a rotating nanoparticle near a
//! planar surface, in the fluctuational-electrodynamics dipole approximation.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod greens;
pub mod materials;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod response;
pub mod units;

pub use error::{Error, Result};
pub use greens::{ImGreenDiag, PlanarGeometry};
pub use materials::{DielectricModel, LorentzTerm};
pub use observables::{Environment, SpinningBody, Totals};
pub use quadrature::QuadratureConfig;
pub use response::{BodySusceptibility, Polarizability, SusceptibilityModel};
pub use units::UnitSystem;
