//! The family `f_ε` of axisymmetric maps of `B(0, 10)` and its limit.
//!
//! For `r < 2` a point `(r, α, β)` is sent to `(R cos T, R T, β)` and then
//! reflected through the xy-plane, where `R` and `T` are the piecewise
//! fields of [`fields`]. Each sphere `S(0, r)` becomes a drop-shaped surface;
//! the drops are nested and converge, as `ε -> 0`, to a map whose inner drops
//! come from the wrong side. Between `r = 2` and `r = 10` a shell interpolates
//! to the identity on the outer sphere.

mod family;
pub mod fields;
mod params;

pub use family::{eval_family, eval_limit, region_list, FamilyMap, LimitMap, DOMAIN_RADIUS};
pub use fields::{angle_field, classify, psi, radius_field, s_curve, thickness, xi};
pub use params::{admissible_p, make_params, MapParams, EPS_MAX};
