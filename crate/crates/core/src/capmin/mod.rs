//! Minimizers of the tangential Dirichlet energy on flat disks and small
//! spherical caps.
//!
//! A cap is charted by projection along its axis onto a planar disk, where
//! the energy becomes `∫ Du · (I - x xᵀ/r²) Du dx`. Each target coordinate is
//! a P1 finite element solve on a Delaunay mesh of the chart disk, with the
//! boundary nodes pinned to the trace.

mod fem;
mod mesh;

pub use fem::{
    solve_cap, solve_on_mesh, CapGeometry, CapProblem, CapSolution, Stiffness, Trace, CAP_DIAMETER_FRACTION, CG_ACCEPT,
};
pub use mesh::{delaunay, triangulate_disk, PlanarMesh, MIN_ANGLE_DEG};
