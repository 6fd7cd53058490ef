//! Dual one-point codes on the Giulietti-Korchmáros curve.
//!
//! The crate is organised bottom-up:
//!
//! * [`ff_tower`] – arithmetic in `F_{p^n}` and its Frobenius subfields;
//! * [`linalg`] – exact row reduction, rank and kernels;
//! * [`gk_curve`] – rational points, orbits and coordinate divisors;
//! * [`pg3_geometry`] – lines, planes and conics of `PG(3, l^6)` meeting the curve;
//! * [`av_code`] – affine-variety evaluation codes and distance classification;
//! * [`weight_count`] – counting and searching low-weight dual codewords;
//! * [`acceptance`] – the end-to-end reproduction checks.

pub mod acceptance;
pub mod av_code;
pub mod error;
pub mod ff_tower;
pub mod gk_curve;
pub mod linalg;
pub mod pg3_geometry;
pub mod weight_count;

pub use error::{Error, Result};
pub use ff_tower::{make_field, Fe, FieldSpec};
pub use gk_curve::{CurveCtx, CurvePoint, Orbit};
