use std::path::PathBuf;

use invlab_core::degree::{
    degree_at, icosphere, push_mesh, verify_weak_identity, DegreeOptions, VectorField, WeakIdentityOptions,
};
use invlab_core::geometry::CartesianPoint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{build_map, family_kind, map_label, one, require};
use crate::config::resolve;
use crate::error::{CliError, Result};
use crate::exec::Rayon;
use crate::maps::MapKind;
use crate::output::{json_document, json_text, num, off_comments, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeakField {
    Radial,
    None,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct Args {
    /// Flat JSON config file; flags override its keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub map: Option<MapKind>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Sphere center as x,y,z.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub mesh_level: Option<u32>,
    /// Query points as a flat list x1,y1,z1,x2,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Option<Vec<f64>>,
    /// Required ratio of distance to image triangle diameter.
    #[arg(long)]
    pub guard: Option<f64>,
    #[arg(long, value_enum)]
    pub weak_field: Option<WeakField>,
    /// Also write the image surface as an OFF mesh (true or false).
    #[arg(long)]
    pub off: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "family_kind")]
    pub map: MapKind,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default = "origin")]
    pub center: Vec<f64>,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_level")]
    pub mesh_level: u32,
    #[serde(default)]
    pub points: Vec<f64>,
    #[serde(default = "default_guard")]
    pub guard: f64,
    #[serde(default = "default_field")]
    pub weak_field: WeakField,
    #[serde(default)]
    pub off: bool,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn origin() -> Vec<f64> {
    vec![0.0; 3]
}

fn default_level() -> u32 {
    5
}

fn default_guard() -> f64 {
    DegreeOptions::default().guard_factor
}

fn default_field() -> WeakField {
    WeakField::Radial
}

fn default_out() -> PathBuf {
    PathBuf::from("out/degree-probe")
}

pub fn execute(args: &Args) -> Result<()> {
    let (cfg, resolved): (Config, Value) = resolve(args.config.as_deref(), args)?;
    let doc = run(&cfg, &resolved)?;
    println!("{}", json_text(&doc).trim_end());
    Ok(())
}

/// Pushes the sphere, evaluates the degree at each point and checks the
/// weak identity. Writes `degree_probe.json` (and `image.off`), then returns
/// the first degree failure if any point failed.
pub fn run(cfg: &Config, resolved: &Value) -> Result<Value> {
    require(cfg.center.len() == 3, || format!("center needs 3 coordinates, got {}", cfg.center.len()))?;
    require(cfg.points.len() % 3 == 0, || format!("points needs a multiple of 3 values, got {}", cfg.points.len()))?;
    require(cfg.guard >= 0.0, || "guard must be nonnegative".into())?;
    let map = build_map(cfg.map, cfg.eps, cfg.a, cfg.p)?;
    let center = CartesianPoint::new(cfg.center[0], cfg.center[1], cfg.center[2]);
    let sphere = icosphere(center, cfg.radius, cfg.mesh_level)?;
    let surface = push_mesh(&map, &sphere, &Rayon)?;
    let dopts = DegreeOptions {
        guard_factor: cfg.guard,
        ..DegreeOptions::default()
    };
    let mut first_error = None;
    let probes: Vec<Value> = cfg
        .points
        .chunks(3)
        .map(|c| {
            let y = CartesianPoint::new(c[0], c[1], c[2]);
            match degree_at(&surface, y, &dopts) {
                Ok(w) => json!({
                    "point": [num(y.x), num(y.y), num(y.z)],
                    "degree": w.degree,
                    "winding": num(w.winding),
                    "residue": num(w.residue),
                    "guard_margin": num(w.guard_margin),
                }),
                Err(e) => {
                    let text = e.to_string();
                    first_error.get_or_insert(e);
                    json!({ "point": [num(y.x), num(y.y), num(y.z)], "error": text })
                }
            }
        })
        .collect();
    let weak = match cfg.weak_field {
        WeakField::None => Value::Null,
        WeakField::Radial => {
            let wopts = WeakIdentityOptions {
                seed: cfg.seed,
                ..WeakIdentityOptions::default()
            };
            match verify_weak_identity(&map, &surface, &VectorField::Radial, &wopts, &Rayon) {
                Ok(w) => json!({
                    "field": "radial",
                    "lhs": num(w.lhs),
                    "rhs": num(w.rhs),
                    "residual": num(w.residual),
                    "failed_nodes": w.failed_nodes,
                    "total_nodes": w.total_nodes,
                    "checked_points": w.checked_points,
                }),
                Err(e) => {
                    let text = e.to_string();
                    first_error.get_or_insert(e);
                    json!({ "field": "radial", "error": text })
                }
            }
        }
    };
    let body = json!({
        "map": map_label(cfg.map, cfg.eps),
        "triangles": surface.triangles.len(),
        "max_image_diameter": num(surface.max_diameter()),
        "probes": probes,
        "weak_identity": weak,
    });
    let doc = json_document("degree-probe", resolved, body);
    let out = OutDir::new(&cfg.out);
    out.write("degree_probe.json", &json_text(&doc))?;
    if cfg.off {
        let comments = off_comments("degree-probe image surface", resolved);
        let refs: Vec<&str> = comments.iter().map(String::as_str).collect();
        out.write("image.off", &surface.to_off(&refs))?;
    }
    match first_error {
        Some(e) => Err(CliError::from(e)),
        None => Ok(doc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dir: &std::path::Path) -> Config {
        serde_json::from_value(json!({
            "map": "identity",
            "mesh_level": 4,
            "points": [0.0, 0.0, 0.0, 0.1, 0.05, -0.1, 3.0, 0.0, 0.0],
            "off": true,
            "seed": 2,
            "out": dir,
        }))
        .unwrap()
    }

    #[test]
    fn identity_degrees_and_weak_identity() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path());
        let resolved = serde_json::to_value(&c).unwrap();
        let doc = run(&c, &resolved).unwrap();
        let degs: Vec<i64> = doc["probes"].as_array().unwrap().iter().map(|p| p["degree"].as_i64().unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 0]);
        assert!(doc["weak_identity"]["residual"].as_f64().unwrap() < 1e-3);
        let off = std::fs::read_to_string(dir.path().join("image.off")).unwrap();
        assert!(off.starts_with("OFF\n# kind: degree-probe image surface\n"));
        assert!(off.contains("format_version: 1"));
    }

    #[test]
    fn guard_failure_is_a_numerical_abort_with_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(dir.path());
        c.points = vec![0.999, 0.0, 0.0];
        c.weak_field = WeakField::None;
        let e = run(&c, &serde_json::to_value(&c).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let doc: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("degree_probe.json")).unwrap()).unwrap();
        assert!(doc["probes"][0]["error"].as_str().unwrap().contains("guard"));
    }

    #[test]
    fn malformed_points_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(dir.path());
        c.points = vec![0.0, 1.0];
        assert_eq!(run(&c, &Value::Null).unwrap_err().exit_code(), 2);
    }
}
