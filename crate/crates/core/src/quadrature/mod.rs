//! Adaptive integration of energy densities over the domain ball.
//!
//! Axial symmetry reduces every integral to the `(r, α)` half-plane with
//! weight `2π r² sin α`. Each smooth patch of the map is parameterized by
//! `(r, t)` with `α = lower(r) + t (upper(r) - lower(r))`, so cells never
//! cross a region boundary even where the boundary curves are not straight.

mod cells;
mod integrate;
mod km;

pub use cells::{region_cells, Cell, CellDecomposition, INITIAL_GRADING};
pub use integrate::{
    integrate_energy, EnergyEntry, FlaggedCell, Functional, QuadratureOptions, RegionValue,
};
pub use km::{km_inequality_check, Bump, KmCheck};
