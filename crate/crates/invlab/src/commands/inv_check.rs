use std::collections::BTreeMap;
use std::path::PathBuf;

use invlab_core::geometry::CartesianPoint;
use invlab_core::invcheck::{check_inv, Ball, InvOptions, InvReport, InvSample, DEFAULT_EDGE_FRACTION, DEFAULT_GUARD_FACTOR};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{build_map, family_kind, map_label, one, require};
use crate::config::resolve;
use crate::error::Result;
use crate::exec::Rayon;
use crate::maps::MapKind;
use crate::output::{csv_text, fmt_f64, json_document, json_text, num, OutDir};

/// Violations listed individually in each report.
const LISTED_VIOLATIONS: usize = 20;

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
    /// Comma-separated radii of balls centered at the origin.
    #[arg(long, value_delimiter = ',')]
    pub balls: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Icosphere level of each ball's boundary before refinement.
    #[arg(long)]
    pub mesh_level: Option<u32>,
    /// Refine pushed spheres until image edges are short (true or false).
    #[arg(long)]
    pub refine: Option<bool>,
    /// Image edge bound as a multiple of the ball radius.
    #[arg(long)]
    pub edge_fraction: Option<f64>,
    #[arg(long)]
    pub guard_factor: Option<f64>,
    /// Radius of the excluded tube around the polar axis.
    #[arg(long)]
    pub tube: Option<f64>,
    /// Largest fraction of samples allowed to fail the degree guard.
    #[arg(long)]
    pub max_skipped: Option<f64>,
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
    pub balls: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_level")]
    pub mesh_level: u32,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default = "default_edge")]
    pub edge_fraction: f64,
    #[serde(default = "default_guard")]
    pub guard_factor: f64,
    #[serde(default = "default_tube")]
    pub tube: f64,
    #[serde(default = "default_skipped")]
    pub max_skipped: f64,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_samples() -> usize {
    1000
}

fn default_level() -> u32 {
    3
}

fn yes() -> bool {
    true
}

fn default_edge() -> f64 {
    DEFAULT_EDGE_FRACTION
}

fn default_guard() -> f64 {
    DEFAULT_GUARD_FACTOR
}

fn default_tube() -> f64 {
    1e-3
}

fn default_skipped() -> f64 {
    0.1
}

fn default_out() -> PathBuf {
    PathBuf::from("out/inv-check")
}

pub fn execute(args: &Args) -> Result<()> {
    let (cfg, resolved): (Config, Value) = resolve(args.config.as_deref(), args)?;
    let reports = run(&cfg, &resolved)?;
    print!("{}", summary_table(&cfg, &reports));
    Ok(())
}

impl Config {
    pub fn options(&self) -> InvOptions {
        let mut o = InvOptions::new(self.samples, self.mesh_level, self.seed);
        o.image_edge_fraction = self.refine.then_some(self.edge_fraction);
        o.degree.guard_factor = self.guard_factor;
        o.tube_radius = self.tube;
        o.max_skipped_fraction = self.max_skipped;
        o
    }
}

fn point(c: CartesianPoint) -> Value {
    json!([num(c.x), num(c.y), num(c.z)])
}

fn sample_json(s: &InvSample) -> Value {
    json!({
        "x": point(s.x),
        "image": point(s.image),
        "degree": s.degree,
        "guard_margin": num(s.guard_margin),
    })
}

fn histogram(r: &InvReport, inside: bool) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for s in r.samples.iter().filter(|s| s.inside == inside) {
        let key = s.degree.map_or("skipped".to_string(), |d| d.to_string());
        *h.entry(key).or_insert(0) += 1;
    }
    h
}

pub fn report_json(label: &str, r: &InvReport) -> Value {
    json!({
        "map": label,
        "ball_radius": num(r.ball.radius),
        "annulus_outer": num(r.annulus_outer),
        "mesh_level": r.mesh_level,
        "n_inside": r.n_inside,
        "n_outside": r.n_outside,
        "skipped": r.skipped,
        "verdict": r.verdict.name(),
        "violations_ii": r.violations_ii.len(),
        "violations_iii": r.violations_iii.len(),
        "inside_degrees": histogram(r, true),
        "outside_degrees": histogram(r, false),
        "listed_violations_ii": r.violations_ii.iter().take(LISTED_VIOLATIONS).map(sample_json).collect::<Vec<_>>(),
        "listed_violations_iii": r.violations_iii.iter().take(LISTED_VIOLATIONS).map(sample_json).collect::<Vec<_>>(),
    })
}

/// Checks every ball, writing `inv_r<radius>.json` for each and
/// `summary.csv` for all of them.
pub fn run(cfg: &Config, resolved: &Value) -> Result<Vec<InvReport>> {
    require(!cfg.balls.is_empty(), || "ball list is empty".into())?;
    require(cfg.guard_factor >= 0.0, || "guard_factor must be nonnegative".into())?;
    require((0.0..=1.0).contains(&cfg.max_skipped), || "max_skipped must lie in [0, 1]".into())?;
    let map = build_map(cfg.map, cfg.eps, cfg.a, cfg.p)?;
    let label = map_label(cfg.map, cfg.eps);
    let opts = cfg.options();
    let out = OutDir::new(&cfg.out);
    let mut reports = Vec::new();
    for &r in &cfg.balls {
        let rep = check_inv(&map, Ball::centered(r), &opts, &Rayon)?;
        let doc = json_document("inv-check", resolved, report_json(&label, &rep));
        out.write(&format!("inv_r{}.json", fmt_f64(r)), &json_text(&doc))?;
        reports.push(rep);
    }
    let header: Vec<String> = ["map", "ball_radius", "verdict", "n_inside", "n_outside", "skipped", "violations_ii", "violations_iii"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                label.clone(),
                fmt_f64(r.ball.radius),
                r.verdict.name().into(),
                r.n_inside.to_string(),
                r.n_outside.to_string(),
                r.skipped.to_string(),
                r.violations_ii.len().to_string(),
                r.violations_iii.len().to_string(),
            ]
        })
        .collect();
    out.write("summary.csv", &csv_text(&header, &rows, resolved)?)?;
    Ok(reports)
}

pub fn summary_table(cfg: &Config, reports: &[InvReport]) -> String {
    let mut s = format!(
        "{:<16} {:>8} {:<16} {:>8} {:>9} {:>8} {:>6} {:>7}\n",
        "map", "radius", "verdict", "inside", "outside", "skipped", "v(ii)", "v(iii)"
    );
    let label = map_label(cfg.map, cfg.eps);
    for r in reports {
        s.push_str(&format!(
            "{:<16} {:>8} {:<16} {:>8} {:>9} {:>8} {:>6} {:>7}\n",
            label,
            fmt_f64(r.ball.radius),
            r.verdict.name(),
            r.n_inside,
            r.n_outside,
            r.skipped,
            r.violations_ii.len(),
            r.violations_iii.len()
        ));
    }
    s
}
