use std::path::PathBuf;

use invlab_core::capmin::{solve_cap, CapGeometry, CapProblem, CapSolution};
use invlab_core::geometry::CartesianPoint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::one;
use crate::config::resolve;
use crate::error::Result;
use crate::output::{json_document, json_text, num, off_comments, off_text, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Disk,
    Cap,
}

/// Boundary data, written in chart coordinates scaled to the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Constant,
    Linear,
    Quadratic,
    Wave,
}

impl TraceKind {
    fn eval(self, s: [f64; 2]) -> [f64; 3] {
        let [x, y] = s;
        match self {
            TraceKind::Constant => [1.0, -2.0, 0.5],
            TraceKind::Linear => [x, y, 2.0 * x - 3.0 * y + 1.0],
            TraceKind::Quadratic => [x * x - y * y, x * y, 0.0],
            TraceKind::Wave => [(3.0 * x).sin(), (2.0 * y).cos(), x * y],
        }
    }

    /// Whether the harmonic extension of the trace is the extension by the
    /// same formula, which holds for polynomials of degree at most two on
    /// flat disks.
    fn exact_on(self, g: GeometryKind) -> bool {
        g == GeometryKind::Disk && self != TraceKind::Wave
    }
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct Args {
    /// Flat JSON config file; flags override its keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryKind>,
    /// Disk radius, or the radius of the sphere carrying the cap.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Angular radius of the cap.
    #[arg(long)]
    pub angle: Option<f64>,
    /// Mesh size as a fraction of the chart radius.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, value_enum)]
    pub trace: Option<TraceKind>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_geometry")]
    pub geometry: GeometryKind,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_angle")]
    pub angle: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_trace")]
    pub trace: TraceKind,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_geometry() -> GeometryKind {
    GeometryKind::Disk
}

fn default_angle() -> f64 {
    0.04
}

fn default_h() -> f64 {
    0.05
}

fn default_trace() -> TraceKind {
    TraceKind::Quadratic
}

fn default_out() -> PathBuf {
    PathBuf::from("out/capmin-solve")
}

pub fn execute(args: &Args) -> Result<()> {
    let (cfg, resolved): (Config, Value) = resolve(args.config.as_deref(), args)?;
    let doc = run(&cfg, &resolved)?;
    println!("{}", json_text(&doc).trim_end());
    Ok(())
}

impl Config {
    pub fn geometry(&self) -> CapGeometry {
        match self.geometry {
            GeometryKind::Disk => CapGeometry::Disk { radius: self.radius },
            GeometryKind::Cap => CapGeometry::Cap {
                sphere_radius: self.radius,
                angle: self.angle,
            },
        }
    }
}

fn component_range(s: &CapSolution, from: usize, to: usize) -> Vec<Value> {
    (0..3)
        .map(|c| {
            let vals = s.values[from..to].iter().map(|v| v[c]);
            let lo = vals.clone().fold(f64::INFINITY, f64::min);
            let hi = vals.fold(f64::NEG_INFINITY, f64::max);
            json!([num(lo), num(hi)])
        })
        .collect()
}

/// Solves and writes `capmin.json`, `capmin_domain.off` (the mesh on the
/// disk or cap) and `capmin_image.off` (the same triangles at the nodal
/// values).
pub fn run(cfg: &Config, resolved: &Value) -> Result<Value> {
    let geometry = cfg.geometry();
    geometry.validate()?;
    let rho = geometry.chart_radius();
    let kind = cfg.trace;
    let scaled = move |p: CartesianPoint| [p.x / rho, p.y / rho];
    let trace = move |p: CartesianPoint| kind.eval(scaled(p));
    let s = solve_cap(&CapProblem {
        geometry,
        trace: &trace,
        mesh_h: cfg.h * rho,
    })?;
    let nb = s.mesh.n_boundary;
    let exact_error = kind.exact_on(cfg.geometry).then(|| {
        s.mesh
            .nodes
            .iter()
            .zip(&s.values)
            .map(|(&x, v)| {
                let e = kind.eval([x[0] / rho, x[1] / rho]);
                (0..3).map(|c| (v[c] - e[c]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    });
    let body = json!({
        "nodes": s.mesh.nodes.len(),
        "boundary_nodes": nb,
        "triangles": s.mesh.triangles.len(),
        "min_angle_deg": num(s.mesh.min_angle_deg()),
        "energy": num(s.energy),
        "solver_residual": num(s.solver_residual),
        "iterations": s.iterations,
        "image_diameter": num(s.image_diameter()),
        "trace_diameter": num(s.trace_diameter()),
        "boundary_range": component_range(&s, 0, nb),
        "interior_range": component_range(&s, nb, s.values.len()),
        "exact_error": exact_error.map(num),
    });
    let doc = json_document("capmin-solve", resolved, body);
    let out = OutDir::new(&cfg.out);
    out.write("capmin.json", &json_text(&doc))?;
    let lifted: Vec<[f64; 3]> = s.lifted_nodes().iter().map(|p| p.to_array()).collect();
    out.write(
        "capmin_domain.off",
        &off_text(&off_comments("capmin-solve domain", resolved), &lifted, &s.mesh.triangles),
    )?;
    out.write(
        "capmin_image.off",
        &off_text(&off_comments("capmin-solve image", resolved), &s.values, &s.mesh.triangles),
    )?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_with(v: Value) -> (Value, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let mut v = v;
        v["out"] = json!(dir.path());
        let cfg: Config = serde_json::from_value(v).unwrap();
        let resolved = serde_json::to_value(&cfg).unwrap();
        (run(&cfg, &resolved).unwrap(), dir)
    }

    #[test]
    fn linear_data_on_a_disk_is_exact() {
        let (doc, dir) = run_with(json!({"trace": "linear", "h": 0.1}));
        assert!(doc["exact_error"].as_f64().unwrap() < 1e-12);
        let off = std::fs::read_to_string(dir.path().join("capmin_image.off")).unwrap();
        let counts = off.lines().find(|l| !l.starts_with('#') && *l != "OFF").unwrap();
        assert_eq!(counts, format!("{} {} 0", doc["nodes"], doc["triangles"]));
    }

    #[test]
    fn cap_solution_obeys_the_maximum_principle() {
        let (doc, _dir) = run_with(json!({"geometry": "cap", "trace": "wave", "h": 0.1}));
        assert!(doc["exact_error"].is_null());
        for c in 0..3 {
            let b = &doc["boundary_range"][c];
            let i = &doc["interior_range"][c];
            assert!(i[0].as_f64().unwrap() >= b[0].as_f64().unwrap() - 1e-12);
            assert!(i[1].as_f64().unwrap() <= b[1].as_f64().unwrap() + 1e-12);
        }
    }

    #[test]
    fn oversized_cap_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg: Config = serde_json::from_value(json!({"geometry": "cap", "angle": 0.2, "out": dir.path()})).unwrap();
        assert_eq!(run(&cfg, &Value::Null).unwrap_err().exit_code(), 3);
    }
}
