//! Topological degree of maps restricted to spheres.
//!
//! A sphere is triangulated ([`icosphere`]), pushed through the map
//! ([`push_mesh`]), and the degree at a point is the winding number of the
//! resulting closed polyhedron ([`degree_at`]).

mod mesh;
mod refine;
mod tree;
mod weak;
mod winding;

pub use mesh::{area_vector, icosphere, push_mesh, ImageSurface, ImageTriangle, TriangulatedSphere, MAX_LEVEL};
pub use refine::{refine_for_image, RefineOptions};
pub use tree::WindingTree;
pub use weak::{crossing_degree, verify_weak_identity, VectorField, WeakIdentity, WeakIdentityOptions};
pub use winding::{
    degree_at, degree_at_union, in_topological_image, point_triangle_distance, solid_angle, winding,
    winding_union, DegreeOptions, Winding,
};
