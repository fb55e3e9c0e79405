//! Numerical laboratory for planar mappings of finite distortion.
//!
//! The crate evaluates radially symmetric spiral maps with exponentially
//! integrable distortion, measures how far they rotate around a point, and
//! reproduces the modulus-of-path-family estimates that bound that rotation.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `rotlab` companion crate.
//!
//! Modules, bottom-up:
//!
//! * [`plane`]: principal argument, argument continuation along sampled
//!   paths, finite-difference Wirtinger derivatives.
//! * [`maps`]: the map families, their closed-form derivatives, Beltrami
//!   coefficient, distortion and integrability predicates.
//! * [`rotation`]: winding along rays, directional suprema, rotation
//!   estimates and growth exponents.
//! * [`modulus`]: the dyadic admissible density, weighted-modulus upper
//!   bounds, ray crossings and the crossing-based lower bound, and the
//!   geometric-partition lemma.
//! * [`integrability`]: shell-by-shell classification of `exp(p K)`
//!   integrability near the origin.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fit;
pub mod integrability;
pub mod maps;
pub mod modulus;
pub mod plane;
pub mod quad;
pub mod rotation;

pub use error::{Error, Result};
pub use maps::{Family, MapSpec};
pub use plane::{Complex, ContinuedArgument, PlaneMap, PolarPoint, WirtingerPair};
