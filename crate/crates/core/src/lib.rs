//! Klein-Gordon particle in a one-dimensional cavity whose right wall moves
//! outward at constant speed.
//!
//! The crate evaluates the exact moving-wall solutions (built on Bessel
//! functions of imaginary order), the static-well eigenstates, KG densities
//! and currents, and the expansion of a moving-wall state over the static
//! basis. `experiments` strings these together into reproducible scenarios.

pub mod bessel_im;
pub mod cavity_states;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod observables;
pub mod spectral;
pub mod xprec;

pub use error::{Error, Result};
pub use exec::Exec;
