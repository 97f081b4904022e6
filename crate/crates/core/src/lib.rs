//! Numerical core for studying an axisymmetric family of Sobolev maps of the
//! ball `B(0, 10)` and the invertibility condition (INV).
//!
//! The crate is `no_std` with `alloc`. All transcendental functions go through
//! `libm`, so results are bit-reproducible across platforms and thread counts.
//!
//! Layout:
//! - [`geometry`]: points, spherical charts, reflection.
//! - [`map`]: the [`map::AxisymmetricMap`] abstraction and trivial maps.
//! - [`mapfamily`]: the parameterized family `f_ε`, its limit and scalar fields.
//! - [`differential`]: analytic and finite-difference differentials.
//! - [`quadrature`]: adaptive integration of energy functionals.
//! - [`degree`]: topological degree of images of spheres, weak identity.
//! - [`invcheck`]: sampled verification of (INV).
//! - [`capmin`]: Dirichlet minimizers on spherical caps.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod capmin;
pub mod degree;
pub mod differential;
mod error;
pub mod exec;
pub mod geometry;
pub mod invcheck;
pub mod map;
pub mod mapfamily;
pub mod math;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
