use std::f64::consts::PI;
use std::path::PathBuf;

use invlab_core::map::{AngleCurve, AxisymmetricMap};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{build_map, family_kind, map_label, one, require};
use crate::config::resolve;
use crate::error::Result;
use crate::maps::{AnyMap, MapKind};
use crate::output::{OutDir, Svg};

/// Extra samples placed across the strip of each sphere.
const STRIP_SAMPLES: usize = 256;
const PANEL: f64 = 420.0;
const MARGIN: f64 = 30.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

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
    /// Comma-separated sphere radii.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Uniform samples in the polar angle per half-plane.
    #[arg(long)]
    pub samples: Option<usize>,
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
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_radii() -> Vec<f64> {
    vec![0.5, 1.5, 2.0]
}

fn default_samples() -> usize {
    721
}

fn default_out() -> PathBuf {
    PathBuf::from("out/horseshoe-plot")
}

pub fn execute(args: &Args) -> Result<()> {
    let (cfg, resolved): (Config, Value) = resolve(args.config.as_deref(), args)?;
    let path = run(&cfg, &resolved)?;
    println!("horseshoe-plot: wrote {}", path.display());
    Ok(())
}

fn strip(map: &AnyMap, r: f64) -> Option<(f64, f64)> {
    let lo = map.curve(AngleCurve::StripLower, r);
    let hi = map.curve(AngleCurve::StripUpper, r);
    (lo.is_finite() && hi.is_finite() && lo < hi).then_some((lo, hi))
}

/// Polar angles for tracing the image of `S(0, r)`: a uniform grid plus
/// Chebyshev-clustered points across the strip, where the image moves fast.
fn angles(map: &AnyMap, r: f64, samples: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (0..samples).map(|k| PI * k as f64 / (samples - 1) as f64).collect();
    if let Some((lo, hi)) = strip(map, r) {
        for k in 0..=STRIP_SAMPLES {
            let t = 0.5 * (1.0 - (PI * k as f64 / STRIP_SAMPLES as f64).cos());
            a.push(lo + t * (hi - lo));
        }
    }
    a.sort_by(f64::total_cmp);
    a.dedup();
    a
}

/// Closed cross-section curve of the image of `S(0, r)` in the xz-plane:
/// the `β = 0` half traced downward, then the `β = π` half back up.
pub fn image_curve(map: &AnyMap, r: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
    let mut half = Vec::new();
    for a in angles(map, r, samples) {
        let (ri, ai) = map.image(r, a)?;
        half.push((ri * ai.sin(), ri * ai.cos()));
    }
    let mut curve = half.clone();
    curve.extend(half.iter().rev().map(|&(x, z)| (-x, z)));
    Ok(curve)
}

/// The curves `α = S(r)` or `α = S̃(r)` for `0 < r < 2`, in both half-planes.
fn strip_curves(map: &AnyMap, upper: bool, r_max: f64) -> Vec<Vec<(f64, f64)>> {
    let which = if upper { AngleCurve::StripUpper } else { AngleCurve::StripLower };
    let n = 400;
    let top = r_max.min(2.0);
    let pts: Vec<(f64, f64)> = (1..n)
        .map(|k| top * k as f64 / n as f64)
        .filter_map(|r| {
            let a = map.curve(which, r);
            a.is_finite().then(|| (r * a.sin(), r * a.cos()))
        })
        .collect();
    if pts.is_empty() {
        return Vec::new();
    }
    let mirror = pts.iter().map(|&(x, z)| (-x, z)).collect();
    vec![pts, mirror]
}

struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Frame {
    fn new(left: f64, extent: f64) -> Self {
        Frame {
            cx: left + PANEL / 2.0,
            cy: MARGIN + PANEL / 2.0,
            scale: (PANEL / 2.0 - 10.0) / extent,
        }
    }

    fn at(&self, p: (f64, f64)) -> (f64, f64) {
        (self.cx + self.scale * p.0, self.cy - self.scale * p.1)
    }
}

fn extent(curves: &[Vec<(f64, f64)>]) -> f64 {
    curves
        .iter()
        .flatten()
        .map(|&(x, z)| x.abs().max(z.abs()))
        .fold(0.0, f64::max)
        .max(1e-9)
}

/// Writes `horseshoe_<map>.svg` and returns its path.
pub fn run(cfg: &Config, resolved: &Value) -> Result<PathBuf> {
    require(!cfg.radii.is_empty(), || "radius list is empty".into())?;
    require(cfg.samples >= 3, || format!("need at least 3 samples, got {}", cfg.samples))?;
    let map = build_map(cfg.map, cfg.eps, cfg.a, cfg.p)?;
    let bound = map.domain_radius();
    for &r in &cfg.radii {
        require(r > 0.0 && r <= bound, || format!("radius {r} outside (0, {bound}]"))?;
    }
    let label = map_label(cfg.map, cfg.eps);
    let images = cfg
        .radii
        .iter()
        .map(|&r| image_curve(&map, r, cfg.samples))
        .collect::<Result<Vec<_>>>()?;
    let r_max = cfg.radii.iter().copied().fold(0.0, f64::max);

    let mut svg = Svg::new(2.0 * PANEL + 3.0 * MARGIN, PANEL + 2.0 * MARGIN);
    let dom = Frame::new(MARGIN, r_max);
    let img = Frame::new(2.0 * MARGIN + PANEL, extent(&images));
    for (f, title) in [(&dom, "domain"), (&img, "image")] {
        let half = PANEL / 2.0;
        svg.line((f.cx - half, f.cy), (f.cx + half, f.cy), "#bbbbbb", 0.5);
        svg.line((f.cx, f.cy - half), (f.cx, f.cy + half), "#bbbbbb", 0.5);
        svg.text(f.cx - half + 4.0, MARGIN - 8.0, 14.0, title);
    }
    for (k, &r) in cfg.radii.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        svg.circle(dom.cx, dom.cy, dom.scale * r, color, 1.2);
        let pts: Vec<(f64, f64)> = images[k].iter().map(|&p| img.at(p)).collect();
        svg.polyline(&pts, color, 1.2, true);
        svg.text(2.0 * MARGIN + PANEL + 4.0 + 70.0 * k as f64, MARGIN + PANEL + 20.0, 12.0, &format!("r = {r}"));
    }
    for upper in [false, true] {
        let style = if upper { "#444444" } else { "#888888" };
        for c in strip_curves(&map, upper, r_max) {
            let pts: Vec<(f64, f64)> = c.iter().map(|&p| dom.at(p)).collect();
            svg.polyline(&pts, style, 0.8, false);
        }
    }
    let text = svg.finish(&format!("cross-sections of {label}"), resolved);
    OutDir::new(&cfg.out).write(&format!("horseshoe_{label}.svg"), &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
        (a.0 - b.0).abs() < tol && (a.1 - b.1).abs() < tol
    }

    #[test]
    fn outer_sphere_is_a_circle() {
        let m = AnyMap::family(0.1).unwrap();
        for (x, z) in image_curve(&m, 10.0, 91).unwrap() {
            assert!(((x * x + z * z).sqrt() - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn curves_are_closed_and_radius_two_does_not_depend_on_eps() {
        let a = image_curve(&AnyMap::family(0.1).unwrap(), 2.0, 181).unwrap();
        assert!(close(a[0], *a.last().unwrap(), 1e-9));
        let (m1, m2) = (AnyMap::family(0.1).unwrap(), AnyMap::family(0.2).unwrap());
        for k in 0..181 {
            let alpha = PI * k as f64 / 180.0;
            let (r1, a1) = m1.image(2.0, alpha).unwrap();
            let (r2, a2) = m2.image(2.0, alpha).unwrap();
            assert!((r1 - r2).abs() < 1e-12 && (a1 - a2).abs() < 1e-12, "alpha {alpha}");
        }
    }

    #[test]
    fn limit_sphere_of_radius_half_is_a_single_drop_below_the_plane() {
        let m = AnyMap::build(MapKind::Limit, None, 1.0, None).unwrap();
        let c = image_curve(&m, 0.5, 361).unwrap();
        assert!(c.iter().all(|&(_, z)| z <= 1e-12));
        assert!(close(c[0], *c.last().unwrap(), 1e-12));
    }

    #[test]
    fn output_is_deterministic_svg() {
        let dir = tempfile::tempdir().unwrap();
        let cfg: Config = serde_json::from_value(json!({"eps": 0.1, "radii": [0.5, 1.5, 2.0], "out": dir.path()})).unwrap();
        let resolved = serde_json::to_value(&cfg).unwrap();
        let p = run(&cfg, &resolved).unwrap();
        let first = std::fs::read(&p).unwrap();
        run(&cfg, &resolved).unwrap();
        assert_eq!(first, std::fs::read(&p).unwrap());
        let text = String::from_utf8(first).unwrap();
        assert_eq!(text.matches("<polygon").count(), 3);
        assert_eq!(text.matches("<circle").count(), 3);
        assert_eq!(text.matches("<polyline").count(), 4);
        assert!(text.contains("<metadata>"));
    }
}
