//! Sampled verification of the (INV) condition on balls.
//!
//! For a ball `B`, points of `B` must map into the topological image of the
//! boundary sphere (nonzero degree) and points outside `B` must map outside
//! it (zero degree). Both are tested on low-discrepancy samples, with the
//! degree read off the pushed icosphere of `∂B`.

use alloc::vec::Vec;

use crate::degree::{icosphere, push_mesh, refine_for_image, DegreeOptions, ImageSurface, RefineOptions, WindingTree};
use crate::differential::{jacobian, partials, Mode};
use crate::exec::Executor;
use crate::geometry::{to_cartesian, CartesianPoint, SphericalPoint};
use crate::map::{AxisymmetricMap, PointMap};
use crate::math::{acos, cbrt, pow, sqrt, TAU};
use crate::sampling::Halton;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: CartesianPoint,
    pub radius: f64,
}

impl Ball {
    pub fn centered(radius: f64) -> Self {
        Ball {
            center: CartesianPoint::ORIGIN,
            radius,
        }
    }
}

pub const DEFAULT_EDGE_FRACTION: f64 = 0.008;
pub const DEFAULT_GUARD_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvOptions {
    pub n_samples: usize,
    pub mesh_level: u32,
    /// When set, the pushed sphere is refined until image edges are shorter
    /// than this multiple of the ball radius.
    pub image_edge_fraction: Option<f64>,
    /// Samples closer than this to the polar axis are redrawn.
    pub tube_radius: f64,
    pub seed: u64,
    pub degree: DegreeOptions,
    /// The check aborts when more than this fraction of samples fail the
    /// degree guard.
    pub max_skipped_fraction: f64,
    /// Radius of the domain ball; the sampling annulus is clipped to it.
    pub domain_radius: f64,
}

impl InvOptions {
    pub fn new(n_samples: usize, mesh_level: u32, seed: u64) -> Self {
        InvOptions {
            n_samples,
            mesh_level,
            image_edge_fraction: Some(DEFAULT_EDGE_FRACTION),
            tube_radius: 1e-3,
            seed,
            degree: DegreeOptions {
                guard_factor: DEFAULT_GUARD_FACTOR,
                ..DegreeOptions::default()
            },
            max_skipped_fraction: 0.1,
            domain_radius: crate::mapfamily::DOMAIN_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    /// Some inside sample maps where the degree vanishes.
    ViolatedInside,
    /// Some outside sample maps where the degree does not vanish.
    ViolatedOutside,
    ViolatedBoth,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::ViolatedInside => "violated(ii)",
            Verdict::ViolatedOutside => "violated(iii)",
            Verdict::ViolatedBoth => "violated(both)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvSample {
    pub x: CartesianPoint,
    pub image: CartesianPoint,
    pub inside: bool,
    /// `None` when the sample failed the degree guard.
    pub degree: Option<i64>,
    pub guard_margin: f64,
}

/// Outcome of [`check_inv`]. `n_inside` and `n_outside` count guarded
/// samples, so `n_inside + n_outside + skipped = n_samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvReport {
    pub ball: Ball,
    pub annulus_outer: f64,
    pub mesh_level: u32,
    pub n_inside: usize,
    pub n_outside: usize,
    pub skipped: usize,
    pub violations_ii: Vec<InvSample>,
    pub violations_iii: Vec<InvSample>,
    pub verdict: Verdict,
    /// Every sample in draw order, inside samples first.
    pub samples: Vec<InvSample>,
}

impl InvReport {
    /// Fraction of guarded samples selected by `keep` whose degree is `deg`.
    pub fn fraction_with_degree(&self, deg: i64, keep: impl Fn(&InvSample) -> bool) -> (f64, usize) {
        let guarded: Vec<&InvSample> = self.samples.iter().filter(|s| s.degree.is_some() && keep(s)).collect();
        let hits = guarded.iter().filter(|s| s.degree == Some(deg)).count();
        let n = guarded.len();
        (if n == 0 { f64::NAN } else { hits as f64 / n as f64 }, n)
    }
}

/// Point with `|x - c|` distributed uniformly in volume between `r0` and
/// `r1`, from a point of the unit cube.
fn shell_point(c: CartesianPoint, r0: f64, r1: f64, u: [f64; 3]) -> CartesianPoint {
    let r = cbrt(r0 * r0 * r0 + u[0] * (r1 * r1 * r1 - r0 * r0 * r0));
    let alpha = acos(1.0 - 2.0 * u[1]);
    c.add(to_cartesian(SphericalPoint::new(r, alpha, TAU * u[2] - 0.5 * TAU)))
}

fn draw(seed: u64, n: usize, c: CartesianPoint, r0: f64, r1: f64, tube: f64) -> Vec<CartesianPoint> {
    let mut out = Vec::with_capacity(n);
    for u in Halton::<3>::new(seed) {
        if out.len() == n {
            break;
        }
        let x = shell_point(c, r0, r1, u);
        if sqrt(x.x * x.x + x.y * x.y) >= tube {
            out.push(x);
        }
    }
    out
}

fn validate(ball: &Ball, opts: &InvOptions) -> Result<()> {
    if !(ball.radius > 0.0) || !(ball.center.norm() + ball.radius < opts.domain_radius) {
        return Err(Error::InvalidParameter(alloc::format!(
            "ball of radius {} at {:?} is not compactly inside the domain",
            ball.radius,
            ball.center
        )));
    }
    if opts.n_samples < 100 {
        return Err(Error::InvalidParameter(alloc::format!(
            "at least 100 samples required, got {}",
            opts.n_samples
        )));
    }
    if let Some(f) = opts.image_edge_fraction {
        if !(f > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("image edge fraction must be positive, got {f}")));
        }
    }
    if !(opts.tube_radius >= 0.0) {
        return Err(Error::InvalidParameter("negative axis tube radius".into()));
    }
    Ok(())
}

/// Classifies samples of `ball` and of the annulus up to twice its radius by
/// the degree of `f|∂B` at their images.
pub fn check_inv<M, E>(map: &M, ball: Ball, opts: &InvOptions, exec: &E) -> Result<InvReport>
where
    M: PointMap + ?Sized,
    E: Executor,
{
    validate(&ball, opts)?;
    let mesh = icosphere(ball.center, ball.radius, opts.mesh_level)?;
    let surface = match opts.image_edge_fraction {
        Some(f) => refine_for_image(map, &mesh, &RefineOptions::new(f * ball.radius), exec)?,
        None => push_mesh(map, &mesh, exec)?,
    };
    check_inv_on(map, ball, &surface, opts, exec)
}

/// [`check_inv`] with an already pushed boundary surface.
pub fn check_inv_on<M, E>(map: &M, ball: Ball, surface: &ImageSurface, opts: &InvOptions, exec: &E) -> Result<InvReport>
where
    M: PointMap + ?Sized,
    E: Executor,
{
    validate(&ball, opts)?;
    let outer = (2.0 * ball.radius).min(opts.domain_radius - ball.center.norm());
    let n_in = opts.n_samples.div_ceil(2);
    let n_out = opts.n_samples - n_in;
    let mut points = draw(opts.seed, n_in, ball.center, 0.0, ball.radius, opts.tube_radius);
    points.extend(draw(
        opts.seed ^ 0x9E37_79B9_7F4A_7C15,
        n_out,
        ball.center,
        ball.radius,
        outer,
        opts.tube_radius,
    ));
    let tree = WindingTree::new(surface);
    let results = exec.map_indexed(points.len(), &|k| -> Result<InvSample> {
        let x = points[k];
        let image = map.map_point(x)?;
        let w = tree.winding(image);
        Ok(InvSample {
            x,
            image,
            inside: k < n_in,
            degree: w.passes(&opts.degree).then_some(w.degree),
            guard_margin: w.guard_margin,
        })
    });
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let skipped = samples.iter().filter(|s| s.degree.is_none()).count();
    if skipped as f64 > opts.max_skipped_fraction * samples.len() as f64 {
        return Err(Error::TooManyGuardFailures {
            failed: skipped,
            total: samples.len(),
        });
    }
    let violations_ii: Vec<InvSample> = samples.iter().filter(|s| s.inside && s.degree == Some(0)).copied().collect();
    let violations_iii: Vec<InvSample> = samples
        .iter()
        .filter(|s| !s.inside && matches!(s.degree, Some(d) if d != 0))
        .copied()
        .collect();
    let verdict = match (violations_ii.is_empty(), violations_iii.is_empty()) {
        (true, true) => Verdict::Satisfied,
        (false, true) => Verdict::ViolatedInside,
        (true, false) => Verdict::ViolatedOutside,
        (false, false) => Verdict::ViolatedBoth,
    };
    Ok(InvReport {
        ball,
        annulus_outer: outer,
        mesh_level: surface.source.level,
        n_inside: samples.iter().filter(|s| s.inside && s.degree.is_some()).count(),
        n_outside: samples.iter().filter(|s| !s.inside && s.degree.is_some()).count(),
        skipped,
        violations_ii,
        violations_iii,
        verdict,
        samples,
    })
}

/// Smallest Jacobian found over quasi-random points of the domain ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianSample {
    pub points: usize,
    /// Points dropped because they fell on a region boundary.
    pub skipped: usize,
    pub min_jacobian: f64,
    pub argmin: SphericalPoint,
}

pub fn sample_min_jacobian<M, E>(map: &M, n: usize, tube_radius: f64, seed: u64, exec: &E) -> Result<JacobianSample>
where
    M: AxisymmetricMap + ?Sized,
    E: Executor,
{
    let radius = map.domain_radius();
    let pts = draw(seed, n, CartesianPoint::ORIGIN, 0.0, radius, tube_radius);
    let js = exec.map_indexed(pts.len(), &|k| -> Result<Option<(f64, SphericalPoint)>> {
        let p = crate::geometry::to_spherical(pts[k]);
        match partials(map, p, Mode::Analytic) {
            Ok(d) => Ok(Some((jacobian(&d), p))),
            Err(Error::OnRegionBoundary { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut out = JacobianSample {
        points: 0,
        skipped: 0,
        min_jacobian: f64::INFINITY,
        argmin: SphericalPoint::new(0.0, 0.0, 0.0),
    };
    for j in js {
        match j? {
            Some((v, p)) => {
                out.points += 1;
                if !(v >= out.min_jacobian) {
                    out.min_jacobian = v;
                    out.argmin = p;
                }
            }
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

/// Outcome of testing `f(x) != f(y)` on sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivitySample {
    pub pairs: usize,
    pub collisions: usize,
    /// Smallest `|f(x) - f(y)| / |x - y|` seen.
    pub min_ratio: f64,
}

/// Draws `n` pairs in the domain ball outside the axis tube. Half are far
/// pairs of independent points; half are near pairs at separations spread
/// log-uniformly over `[1e-8, 1e-1]` times the domain radius.
pub fn sample_injectivity<M, E>(map: &M, n: usize, tube_radius: f64, seed: u64, exec: &E) -> Result<InjectivitySample>
where
    M: AxisymmetricMap + ?Sized,
    E: Executor,
{
    let radius = map.domain_radius();
    let xs = draw(seed, n, CartesianPoint::ORIGIN, 0.0, 0.9 * radius, tube_radius);
    let ys = draw(seed.wrapping_add(1), n, CartesianPoint::ORIGIN, 0.0, 0.9 * radius, tube_radius);
    let dirs: Vec<[f64; 3]> = Halton::<3>::new(seed.wrapping_add(2)).take(n).collect();
    let res = exec.map_indexed(n, &|k| -> Result<Option<f64>> {
        let x = xs[k];
        let y = if k % 2 == 0 {
            ys[k]
        } else {
            let u = dirs[k];
            let d = shell_point(CartesianPoint::ORIGIN, 1.0, 1.0, [0.0, u[1], u[2]]);
            let y = x.add(d.scale(radius * pow(10.0, -8.0 + 7.0 * u[0])));
            if sqrt(y.x * y.x + y.y * y.y) < tube_radius || y.norm() >= radius {
                return Ok(None);
            }
            y
        };
        let sep = x.dist(y);
        if sep == 0.0 {
            return Ok(None);
        }
        Ok(Some(map.apply(x)?.dist(map.apply(y)?) / sep))
    });
    let mut out = InjectivitySample {
        pairs: 0,
        collisions: 0,
        min_ratio: f64::INFINITY,
    };
    for r in res {
        if let Some(q) = r? {
            out.pairs += 1;
            if q == 0.0 {
                out.collisions += 1;
            }
            out.min_ratio = out.min_ratio.min(q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Serial;
    use crate::map::{Identity, ReflectZ};

    #[test]
    fn identity_satisfies_inv() {
        let id = Identity { radius: 10.0 };
        let opts = InvOptions::new(1000, 3, 3);
        let rep = check_inv(&id, Ball::centered(1.0), &opts, &Serial).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied);
        assert_eq!(rep.n_inside + rep.n_outside + rep.skipped, 1000);
        assert!(rep.samples.iter().all(|s| s.degree.is_none() || s.degree == Some(s.inside as i64)));
        assert!((rep.annulus_outer - 2.0).abs() < 1e-15);
        let again = check_inv(&id, Ball::centered(1.0), &opts, &Serial).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn reflection_violates_nothing_but_has_negative_degree() {
        let rz = ReflectZ { radius: 10.0 };
        let rep = check_inv(&rz, Ball::centered(1.0), &InvOptions::new(200, 3, 1), &Serial).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied);
        let (frac, n) = rep.fraction_with_degree(-1, |s| s.inside);
        assert!(n > 0 && frac == 1.0);
    }

    #[test]
    fn coarse_mesh_aborts() {
        let id = Identity { radius: 10.0 };
        let opts = InvOptions {
            image_edge_fraction: None,
            ..InvOptions::new(200, 1, 1)
        };
        let e = check_inv(&id, Ball::centered(1.0), &opts, &Serial);
        assert!(matches!(e, Err(Error::TooManyGuardFailures { .. })));
    }

    #[test]
    fn preconditions_are_checked() {
        let id = Identity { radius: 10.0 };
        let opts = InvOptions::new(99, 3, 1);
        assert!(check_inv(&id, Ball::centered(1.0), &opts, &Serial).is_err());
        let opts = InvOptions::new(100, 3, 1);
        assert!(check_inv(&id, Ball::centered(10.0), &opts, &Serial).is_err());
    }

    #[test]
    fn samples_avoid_the_axis_tube() {
        let pts = draw(5, 2000, CartesianPoint::ORIGIN, 0.5, 1.0, 0.1);
        assert_eq!(pts.len(), 2000);
        for p in pts {
            assert!(sqrt(p.x * p.x + p.y * p.y) >= 0.1);
            assert!(p.norm() > 0.5 - 1e-12 && p.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn identity_jacobian_and_injectivity() {
        let id = Identity { radius: 10.0 };
        let j = sample_min_jacobian(&id, 500, 1e-3, 2, &Serial).unwrap();
        assert_eq!(j.points, 500);
        assert!((j.min_jacobian - 1.0).abs() < 1e-12);
        let s = sample_injectivity(&id, 500, 1e-3, 2, &Serial).unwrap();
        assert_eq!(s.collisions, 0);
        assert!((s.min_ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn limit_map_flips_degrees_on_small_balls() {
        let lim = crate::mapfamily::LimitMap::new(7.0 / 12.0);
        let rep = check_inv(&lim, Ball::centered(0.5), &InvOptions::new(300, 3, 4), &Serial).unwrap();
        assert_eq!(rep.verdict, Verdict::ViolatedBoth);
        let (inside, n) = rep.fraction_with_degree(0, |s| s.inside);
        assert!(n > 100 && inside >= 0.95, "{inside} of {n}");
        let (shell, n) = rep.fraction_with_degree(-1, |s| !s.inside && s.x.norm() < 1.0);
        assert!(n > 100 && shell >= 0.95, "{shell} of {n}");
    }
}
