//! One module per subcommand. Each parses its flags, merges them over an
//! optional config file, validates the typed config and writes its outputs.

pub mod capmin_solve;
pub mod degree_probe;
pub mod energy_sweep;
pub mod horseshoe;
pub mod inv_check;
pub mod validate;

use crate::error::{CliError, Result};
use crate::maps::{AnyMap, MapKind};

#[derive(Debug, Clone, clap::Subcommand)]
pub enum Command {
    /// Integrate the energy functionals of the family over a list of eps.
    EnergySweep(energy_sweep::Args),
    /// Sample the (INV) condition on balls centered at the origin.
    InvCheck(inv_check::Args),
    /// Degree of a pushed sphere at given points, plus the weak identity.
    DegreeProbe(degree_probe::Args),
    /// Cross-sections of spheres and their images as SVG.
    HorseshoePlot(horseshoe::Args),
    /// Tangential Dirichlet minimizer on a disk or a small spherical cap.
    CapminSolve(capmin_solve::Args),
    /// Run the acceptance suite.
    Validate(validate::Args),
}

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::EnergySweep(a) => energy_sweep::execute(a),
        Command::InvCheck(a) => inv_check::execute(a),
        Command::DegreeProbe(a) => degree_probe::execute(a),
        Command::HorseshoePlot(a) => horseshoe::execute(a),
        Command::CapminSolve(a) => capmin_solve::execute(a),
        Command::Validate(a) => validate::execute(a),
    }
}

fn one() -> f64 {
    1.0
}

fn family_kind() -> MapKind {
    MapKind::Family
}

fn build_map(kind: MapKind, eps: Option<f64>, a: f64, p: Option<f64>) -> Result<AnyMap> {
    AnyMap::build(kind, eps, a, p)
}

fn map_label(kind: MapKind, eps: Option<f64>) -> String {
    match (kind, eps) {
        (MapKind::Family, Some(e)) => format!("family_eps{e}"),
        (MapKind::Family, None) => "family".into(),
        (MapKind::Limit, _) => "limit".into(),
        (MapKind::Identity, _) => "identity".into(),
        (MapKind::Reflect, _) => "reflect".into(),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}
