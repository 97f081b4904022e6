//! The frozen regression suite. Each criterion runs with tolerances pinned
//! below and reports a pass/fail result with the measured quantities.

use std::f64::consts::PI;

use invlab_core::capmin::{solve_cap, CapGeometry, CapProblem, CapSolution};
use invlab_core::degree::{
    degree_at, icosphere, push_mesh, verify_weak_identity, DegreeOptions, VectorField, WeakIdentityOptions,
};
use invlab_core::differential::check_derivatives;
use invlab_core::geometry::CartesianPoint;
use invlab_core::invcheck::{check_inv, sample_injectivity, sample_min_jacobian, Ball, InvOptions, Verdict};
use invlab_core::map::{Identity, ReflectZ, Region};
use invlab_core::mapfamily::DOMAIN_RADIUS;
use invlab_core::quadrature::{integrate_energy, km_inequality_check, Bump, Functional, QuadratureOptions};
use invlab_core::sampling::Halton;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::exec::Rayon;
use crate::maps::AnyMap;
use crate::output::num;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "uniform energy bounds"),
    (2, "sharpness scaling"),
    (3, "degree oracles"),
    (4, "homeomorphism degree"),
    (5, "limit violates INV"),
    (6, "family satisfies INV"),
    (7, "jacobian positivity and injectivity"),
    (8, "derivative correctness"),
    (9, "cap minimizers"),
    (10, "KM inequality"),
];

pub const ENERGY_EPS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
pub const ENERGY_TOL: f64 = 1e-3;
pub const ENERGY_SPREAD: f64 = 1.5;

pub const SCALING_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const SCALING_SLOPE: f64 = -6.0 / 7.0;
pub const SCALING_REL_TOL: f64 = 0.2;

pub const ORACLE_LEVEL: u32 = 5;
pub const WEAK_FAMILY_LEVEL: u32 = 6;
pub const WEAK_IDENTITY_TOL: f64 = 1e-3;
pub const WEAK_FAMILY_TOL: f64 = 1e-2;

pub const HOMEO_SAMPLES: usize = 2400;
pub const HOMEO_MIN_GUARDED: usize = 1000;
pub const INV_SAMPLES: usize = 1000;
pub const INV_BALLS: [f64; 3] = [0.3, 0.5, 0.7];
pub const INV_FRACTION: f64 = 0.95;
pub const INV_EPS: [f64; 2] = [0.2, 0.1];

pub const JACOBIAN_POINTS: usize = 100_000;
pub const INJECTIVITY_PAIRS: usize = 100_000;
pub const AXIS_TUBE: f64 = 1e-3;

pub const DERIVATIVE_POINTS: usize = 1000;
pub const DERIVATIVE_PROXIMITY: f64 = 1e-3;
pub const DERIVATIVE_TOL: f64 = 1e-5;

/// Rounding slack allowed in the discrete maximum and comparison principles.
pub const PRINCIPLE_SLACK: f64 = 1e-12;
pub const QUADRATIC_H: f64 = 0.02;
pub const QUADRATIC_TOL: f64 = 1e-3;
pub const LINEAR_TOL: f64 = 1e-12;

pub const KM_EPS: [f64; 2] = [0.1, 0.05];
pub const KM_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Runs the degree and Jacobian criteria on maps composed with `z -> -z`.
    pub sign_flip: bool,
    /// Replaces the default mesh levels of the degree criteria and disables
    /// adaptive refinement of pushed spheres.
    pub mesh_level: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// The criterion stopped on a numerical error before reaching a verdict.
    pub aborted: bool,
    pub detail: String,
    pub metrics: Map<String, Value>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed {
            "PASS"
        } else if self.aborted {
            "FAIL (aborted)"
        } else {
            "FAIL"
        };
        format!("criterion {}: {status} {}: {}", self.id, self.name, self.detail)
    }
}

struct Outcome {
    passed: bool,
    detail: String,
    metrics: Map<String, Value>,
}

pub fn run_criterion(id: u8, opts: &SuiteOptions) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .ok_or_else(|| CliError::Config(format!("no acceptance criterion {id}; valid ids are 1 to 10")))?;
    let outcome = match id {
        1 => energy_bounds(),
        2 => sharpness_scaling(),
        3 => degree_oracles(opts),
        4 => homeomorphism_degree(opts),
        5 => limit_violates(opts),
        6 => family_satisfies(opts),
        7 => jacobian_and_injectivity(opts),
        8 => derivatives(opts),
        9 => cap_minimizers(opts),
        _ => km_inequality(),
    };
    Ok(match outcome {
        Ok(o) => CriterionResult {
            id,
            name,
            passed: o.passed,
            aborted: false,
            detail: o.detail,
            metrics: o.metrics,
        },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            aborted: true,
            detail: e.to_string(),
            metrics: Map::new(),
        },
    })
}

impl SuiteOptions {
    fn map(&self, m: AnyMap) -> AnyMap {
        if self.sign_flip {
            m.mirrored()
        } else {
            m
        }
    }

    fn inv_options(&self, n: usize) -> InvOptions {
        let mut o = InvOptions::new(n, 3, self.seed);
        if let Some(level) = self.mesh_level {
            o.mesh_level = level;
            o.image_edge_fraction = None;
        }
        o
    }
}

fn family(eps: f64) -> Result<AnyMap> {
    AnyMap::family(eps)
}

fn energy_bounds() -> Result<Outcome> {
    let functionals = [
        ("dirichlet", Functional::Dirichlet),
        ("jac_neg_power_1", Functional::JacNegPower(1.0)),
        ("distortion", Functional::Distortion),
    ];
    let mut values = vec![Vec::new(); functionals.len()];
    let mut converged = true;
    for eps in ENERGY_EPS {
        let m = family(eps)?;
        for (k, (_, f)) in functionals.iter().enumerate() {
            let e = integrate_energy(&m, *f, &QuadratureOptions::new(ENERGY_TOL), &Rayon)?;
            converged &= e.converged;
            values[k].push(e.total);
        }
    }
    let mut metrics = Map::new();
    let mut passed = converged;
    let mut parts = Vec::new();
    for (k, (name, _)) in functionals.iter().enumerate() {
        let hi = values[k].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = values[k].iter().copied().fold(f64::INFINITY, f64::min);
        let spread = hi / lo;
        passed &= lo > 0.0 && spread < ENERGY_SPREAD;
        metrics.insert(format!("{name}_values"), json!(values[k]));
        metrics.insert(format!("{name}_spread"), num(spread));
        parts.push(format!("{name} spread {spread:.4}"));
    }
    metrics.insert("converged".into(), json!(converged));
    Ok(Outcome {
        passed,
        detail: format!("{} (limit {ENERGY_SPREAD}), converged {converged}", parts.join(", ")),
        metrics,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn sharpness_scaling() -> Result<Outcome> {
    let mut opts = QuadratureOptions::new(ENERGY_TOL);
    opts.regions = Some(vec![Region::B]);
    let mut values = Vec::new();
    let mut converged = true;
    for eps in SCALING_EPS {
        let e = integrate_energy(&family(eps)?, Functional::JacNegPower(2.0), &opts, &Rayon)?;
        converged &= e.converged;
        values.push(e.total);
    }
    let slope = loglog_slope(&SCALING_EPS, &values);
    let passed = converged && (slope - SCALING_SLOPE).abs() <= SCALING_REL_TOL * SCALING_SLOPE.abs();
    let mut metrics = Map::new();
    metrics.insert("eps".into(), json!(SCALING_EPS));
    metrics.insert("b_region_values".into(), json!(values));
    metrics.insert("slope".into(), num(slope));
    metrics.insert("target".into(), num(SCALING_SLOPE));
    metrics.insert("converged".into(), json!(converged));
    Ok(Outcome {
        passed,
        detail: format!(
            "log-log slope {slope:.4}, target {SCALING_SLOPE:.4} +- {:.0}%, converged {converged}",
            SCALING_REL_TOL * 100.0
        ),
        metrics,
    })
}

fn degree_oracles(opts: &SuiteOptions) -> Result<Outcome> {
    let level = opts.mesh_level.unwrap_or(ORACLE_LEVEL);
    let dopts = DegreeOptions::default();
    let sphere = icosphere(CartesianPoint::ORIGIN, 1.0, level)?;
    let identity = opts.map(AnyMap::Identity(Identity { radius: DOMAIN_RADIUS }));
    let reflect = opts.map(AnyMap::Reflect(ReflectZ { radius: DOMAIN_RADIUS }));
    let id_surface = push_mesh(&identity, &sphere, &Rayon)?;
    let re_surface = push_mesh(&reflect, &sphere, &Rayon)?;
    let inside = [
        CartesianPoint::ORIGIN,
        CartesianPoint::new(0.2, -0.1, 0.25),
        CartesianPoint::new(-0.3, 0.1, -0.2),
    ];
    let outside = [
        CartesianPoint::new(2.0, 0.0, 0.0),
        CartesianPoint::new(0.3, 1.2, -0.9),
        CartesianPoint::new(0.0, 0.0, -5.0),
    ];
    let mut mismatches = 0;
    let mut degrees = Vec::new();
    for (surface, expect_in) in [(&id_surface, 1), (&re_surface, -1)] {
        for (points, expect) in [(&inside, expect_in), (&outside, 0)] {
            for &y in points.iter() {
                let w = degree_at(surface, y, &dopts)?;
                degrees.push(w.degree);
                if w.degree != expect {
                    mismatches += 1;
                }
            }
        }
    }

    let ball = 4.0 * PI / 3.0;
    let wopts = WeakIdentityOptions {
        seed: opts.seed,
        ..WeakIdentityOptions::default()
    };
    let weak_id = verify_weak_identity(&identity, &id_surface, &VectorField::Radial, &wopts, &Rayon)?;
    let volume_gap = ((weak_id.lhs - ball).abs()).max((weak_id.rhs - ball).abs()) / ball;
    let id_ok = weak_id.residual < WEAK_IDENTITY_TOL && volume_gap < WEAK_IDENTITY_TOL;

    let f = opts.map(family(0.1)?);
    let big = icosphere(CartesianPoint::ORIGIN, 1.5, opts.mesh_level.unwrap_or(WEAK_FAMILY_LEVEL))?;
    let f_surface = push_mesh(&f, &big, &Rayon)?;
    let weak_f = verify_weak_identity(&f, &f_surface, &VectorField::Radial, &wopts, &Rayon)?;
    let f_ok = weak_f.residual < WEAK_FAMILY_TOL;

    let mut metrics = Map::new();
    metrics.insert("degrees".into(), json!(degrees));
    metrics.insert("degree_mismatches".into(), json!(mismatches));
    metrics.insert("identity_weak_lhs".into(), num(weak_id.lhs));
    metrics.insert("identity_weak_rhs".into(), num(weak_id.rhs));
    metrics.insert("identity_weak_residual".into(), num(weak_id.residual));
    metrics.insert("identity_volume_gap".into(), num(volume_gap));
    metrics.insert("family_weak_lhs".into(), num(weak_f.lhs));
    metrics.insert("family_weak_rhs".into(), num(weak_f.rhs));
    metrics.insert("family_weak_residual".into(), num(weak_f.residual));
    Ok(Outcome {
        passed: mismatches == 0 && id_ok && f_ok,
        detail: format!(
            "{mismatches} degree mismatches; identity weak residual {:.2e}, volume gap {volume_gap:.2e} (limit {WEAK_IDENTITY_TOL:e}); family weak residual {:.2e} (limit {WEAK_FAMILY_TOL:e})",
            weak_id.residual, weak_f.residual
        ),
        metrics,
    })
}

fn homeomorphism_degree(opts: &SuiteOptions) -> Result<Outcome> {
    let f = opts.map(family(0.1)?);
    let inv = opts.inv_options(HOMEO_SAMPLES);
    let mut passed = true;
    let mut metrics = Map::new();
    let mut parts = Vec::new();
    for r in [0.5, 1.5] {
        let rep = check_inv(&f, Ball::centered(r), &inv, &Rayon)?;
        let guarded = rep.n_inside;
        let wrong = rep.samples.iter().filter(|s| s.inside && matches!(s.degree, Some(d) if d != 1)).count();
        passed &= guarded >= HOMEO_MIN_GUARDED && wrong == 0;
        metrics.insert(format!("r{r}_guarded_inside"), json!(guarded));
        metrics.insert(format!("r{r}_wrong_degree"), json!(wrong));
        metrics.insert(format!("r{r}_skipped"), json!(rep.skipped));
        parts.push(format!("B(0,{r}): {guarded} guarded inside, {wrong} not degree 1"));
    }
    Ok(Outcome {
        passed,
        detail: format!("{} (need >= {HOMEO_MIN_GUARDED} and 0)", parts.join("; ")),
        metrics,
    })
}

fn limit_violates(opts: &SuiteOptions) -> Result<Outcome> {
    let m = opts.map(AnyMap::build(crate::maps::MapKind::Limit, None, 1.0, None)?);
    let inv = opts.inv_options(INV_SAMPLES);
    let mut passed = true;
    let mut metrics = Map::new();
    let mut parts = Vec::new();
    for r in INV_BALLS {
        let rep = check_inv(&m, Ball::centered(r), &inv, &Rayon)?;
        passed &= rep.verdict == Verdict::ViolatedBoth;
        metrics.insert(format!("r{r}_verdict"), json!(rep.verdict.name()));
        parts.push(format!("r={r} {}", rep.verdict.name()));
        if r == 0.5 {
            let (inside0, n_in) = rep.fraction_with_degree(0, |s| s.inside);
            let (annulus, n_ann) = rep.fraction_with_degree(-1, |s| !s.inside && s.x.norm() > 0.5 && s.x.norm() < 1.0);
            passed &= inside0 >= INV_FRACTION && annulus >= INV_FRACTION;
            metrics.insert("r0.5_inside_degree0".into(), num(inside0));
            metrics.insert("r0.5_inside_guarded".into(), json!(n_in));
            metrics.insert("r0.5_annulus_degree_minus1".into(), num(annulus));
            metrics.insert("r0.5_annulus_guarded".into(), json!(n_ann));
            parts.push(format!(
                "r=0.5 inside deg 0 {:.1}% of {n_in}, annulus deg -1 {:.1}% of {n_ann}",
                100.0 * inside0,
                100.0 * annulus
            ));
        }
    }
    Ok(Outcome {
        passed,
        detail: parts.join("; "),
        metrics,
    })
}

fn family_satisfies(opts: &SuiteOptions) -> Result<Outcome> {
    let inv = opts.inv_options(INV_SAMPLES);
    let mut passed = true;
    let mut metrics = Map::new();
    let mut parts = Vec::new();
    for eps in INV_EPS {
        let m = opts.map(family(eps)?);
        for r in INV_BALLS {
            let rep = check_inv(&m, Ball::centered(r), &inv, &Rayon)?;
            passed &= rep.verdict == Verdict::Satisfied;
            metrics.insert(format!("eps{eps}_r{r}_verdict"), json!(rep.verdict.name()));
            parts.push(format!("eps={eps} r={r} {}", rep.verdict.name()));
        }
    }
    Ok(Outcome {
        passed,
        detail: parts.join("; "),
        metrics,
    })
}

fn jacobian_and_injectivity(opts: &SuiteOptions) -> Result<Outcome> {
    let f = opts.map(family(0.1)?);
    let jac = sample_min_jacobian(&f, JACOBIAN_POINTS, AXIS_TUBE, opts.seed, &Rayon)?;
    let inj = sample_injectivity(&f, INJECTIVITY_PAIRS, AXIS_TUBE, opts.seed, &Rayon)?;
    let mut metrics = Map::new();
    metrics.insert("jacobian_points".into(), json!(jac.points));
    metrics.insert("jacobian_skipped".into(), json!(jac.skipped));
    metrics.insert("min_jacobian".into(), num(jac.min_jacobian));
    metrics.insert("injectivity_pairs".into(), json!(inj.pairs));
    metrics.insert("collisions".into(), json!(inj.collisions));
    metrics.insert("min_ratio".into(), num(inj.min_ratio));
    Ok(Outcome {
        passed: jac.points > 0 && jac.min_jacobian > 0.0 && inj.pairs > 0 && inj.collisions == 0,
        detail: format!(
            "min J {:.3e} over {} points; {} collisions in {} pairs, min ratio {:.3e}",
            jac.min_jacobian, jac.points, inj.collisions, inj.pairs, inj.min_ratio
        ),
        metrics,
    })
}

fn derivatives(opts: &SuiteOptions) -> Result<Outcome> {
    let maps = [
        ("eps0.4", family(0.4)?),
        ("eps0.1", family(0.1)?),
        ("eps0.05", family(0.05)?),
        ("limit", AnyMap::build(crate::maps::MapKind::Limit, None, 1.0, None)?),
    ];
    let mut worst: f64 = 0.0;
    let mut metrics = Map::new();
    for (name, m) in &maps {
        let c = check_derivatives(m, DERIVATIVE_POINTS, DERIVATIVE_PROXIMITY, opts.seed)?;
        worst = worst.max(c.max_relative);
        metrics.insert(format!("{name}_points"), json!(c.points));
        metrics.insert(format!("{name}_max_relative"), num(c.max_relative));
    }
    let enough = maps.iter().all(|(name, _)| metrics[&format!("{name}_points")] == json!(DERIVATIVE_POINTS));
    Ok(Outcome {
        passed: enough && worst < DERIVATIVE_TOL,
        detail: format!(
            "max relative difference {worst:.2e} over {} maps x {DERIVATIVE_POINTS} points (limit {DERIVATIVE_TOL:e})",
            maps.len()
        ),
        metrics,
    })
}

fn nodal_error(s: &CapSolution, exact: impl Fn([f64; 2]) -> [f64; 3]) -> f64 {
    s.mesh
        .nodes
        .iter()
        .zip(&s.values)
        .map(|(&x, v)| {
            let e = exact(x);
            (0..3).map(|c| (v[c] - e[c]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn cap_minimizers(opts: &SuiteOptions) -> Result<Outcome> {
    let cap = CapGeometry::Cap {
        sphere_radius: 1.0,
        angle: 0.04,
    };
    let solve = |g: CapGeometry, h: f64, trace: &(dyn Fn(CartesianPoint) -> [f64; 3] + Sync)| {
        solve_cap(&CapProblem {
            geometry: g,
            trace,
            mesh_h: h,
        })
    };
    let mut max_excess: f64 = 0.0;
    let mut osc_ratio: f64 = 0.0;
    let mut comparison_excess: f64 = f64::NEG_INFINITY;
    for (i, u) in Halton::<3>::new(opts.seed).take(4).enumerate() {
        let (a, b, k) = (10.0 * u[0] - 5.0, 10.0 * u[1] - 5.0, 1.0 + 79.0 * u[2]);
        let f = move |p: CartesianPoint| [(k * p.x + a).sin(), b * p.y * 30.0, (k * p.y).sin() * (k * p.x).sin()];
        let s = solve(cap, 0.005, &f)?;
        let nb = s.mesh.n_boundary;
        for c in 0..3 {
            let lo = s.values[..nb].iter().map(|v| v[c]).fold(f64::INFINITY, f64::min);
            let hi = s.values[..nb].iter().map(|v| v[c]).fold(f64::NEG_INFINITY, f64::max);
            for v in &s.values {
                max_excess = max_excess.max(lo - v[c]).max(v[c] - hi);
            }
        }
        osc_ratio = osc_ratio.max(s.image_diameter() / s.trace_diameter());
        let shift = 0.1 + 0.1 * i as f64;
        let g = move |p: CartesianPoint| {
            let v = f(p);
            [v[0] + shift * (1.0 + (k * p.y).sin()), v[1] + shift, v[2]]
        };
        let t = solve(cap, 0.005, &g)?;
        for (x, y) in s.values.iter().zip(&t.values) {
            comparison_excess = comparison_excess.max(x[0] - y[0]).max(x[1] - y[1]);
        }
    }
    let disk = CapGeometry::Disk { radius: 1.0 };
    let quad = solve(disk, QUADRATIC_H, &|p| [p.x * p.x - p.y * p.y, 0.0, 0.0])?;
    let quad_err = nodal_error(&quad, |x| [x[0] * x[0] - x[1] * x[1], 0.0, 0.0]);
    let lin = solve(disk, 0.05, &|p| [p.x, p.y, 2.0 * p.x - 3.0 * p.y + 1.0])?;
    let lin_err = nodal_error(&lin, |x| [x[0], x[1], 2.0 * x[0] - 3.0 * x[1] + 1.0]);

    let passed = max_excess <= PRINCIPLE_SLACK
        && comparison_excess <= PRINCIPLE_SLACK
        && osc_ratio <= 3f64.sqrt()
        && quad_err < QUADRATIC_TOL
        && lin_err < LINEAR_TOL;
    let mut metrics = Map::new();
    metrics.insert("maximum_principle_excess".into(), num(max_excess.max(0.0)));
    metrics.insert("comparison_excess".into(), num(comparison_excess.max(0.0)));
    metrics.insert("oscillation_ratio".into(), num(osc_ratio));
    metrics.insert("quadratic_error".into(), num(quad_err));
    metrics.insert("linear_error".into(), num(lin_err));
    Ok(Outcome {
        passed,
        detail: format!(
            "max principle excess {:.1e}, comparison excess {:.1e}, oscillation ratio {osc_ratio:.4} (limit 1.7321), quadratic error {quad_err:.2e}, linear error {lin_err:.1e}",
            max_excess.max(0.0),
            comparison_excess.max(0.0)
        ),
        metrics,
    })
}

fn km_inequality() -> Result<Outcome> {
    let opts = QuadratureOptions::new(KM_TOL);
    let mut passed = true;
    let mut metrics = Map::new();
    let mut worst: f64 = 0.0;
    for eps in KM_EPS {
        let m = family(eps)?;
        let dist = integrate_energy(&m, Functional::Distortion, &opts, &Rayon)?;
        for (k, b) in Bump::BUILTIN.iter().enumerate() {
            let c = km_inequality_check(&m, *b, Some(&dist), &opts, &Rayon)?;
            passed &= c.holds && c.converged;
            worst = worst.max(c.lhs / c.rhs);
            metrics.insert(format!("eps{eps}_bump{k}_lhs"), num(c.lhs));
            metrics.insert(format!("eps{eps}_bump{k}_rhs"), num(c.rhs));
        }
    }
    Ok(Outcome {
        passed,
        detail: format!("largest lhs/rhs {worst:.4} over {} bumps x {} maps", Bump::BUILTIN.len(), KM_EPS.len()),
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.75)).collect();
        assert!((loglog_slope(&x, &y) + 0.75).abs() < 1e-12);
    }

    #[test]
    fn unknown_criterion_is_a_config_error() {
        assert!(matches!(run_criterion(11, &SuiteOptions::default()), Err(CliError::Config(_))));
    }

    #[test]
    fn coarse_meshes_abort_the_degree_oracles() {
        let r = run_criterion(
            3,
            &SuiteOptions {
                seed: 1,
                sign_flip: false,
                mesh_level: Some(1),
            },
        )
        .unwrap();
        assert!(r.aborted && !r.passed, "{}", r.line());
    }
}
