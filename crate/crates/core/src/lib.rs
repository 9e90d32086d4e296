//! Numerical laboratory for the chordal Loewner equation with Lip(1/2) driving functions.
//!
//! The forward problem (driver to trace) lives in [`loewner`], the inverse problem in
//! [`welding`]. [`fractal`] generates the example curves, [`capture`] the time-changed
//! capture dynamics, [`dense`] builds drivers visiting prescribed points and
//! [`analysis`] estimates norms and handles file formats.

pub mod analysis;
pub mod capture;
pub mod dense;
pub mod error;
pub mod fractal;
pub mod geometry;
pub mod loewner;
pub mod verify;
pub mod welding;

pub use error::{Error, Result};
pub use geometry::{HalfPlanePoint, Polyline};
