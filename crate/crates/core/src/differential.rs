//! Pointwise derivative data of axisymmetric maps.
//!
//! In the orthonormal spherical frames of domain and target the differential
//! of `(r, α, β) -> (r̃, α̃, β)` is block diagonal:
//!
//! ```text
//! | ∂r r̃        ∂α r̃ / r        0    |
//! | r̃ ∂r α̃      r̃ ∂α α̃ / r      0    |
//! | 0           0               azim |
//! ```
//!
//! with `azim = r̃ sin α̃ / (r sin α)`.

use crate::geometry::SphericalPoint;
use crate::map::{AxisymmetricMap, Partials};
use crate::math::{sin, sqrt, PI};
use crate::sampling::Halton;
use crate::{Error, Result};

/// Smallest boundary proximity at which analytic partials are evaluated.
pub const BOUNDARY_EXCLUSION: f64 = 1e-9;

/// How partial derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Closed-form chain rule through the active branch.
    Analytic,
    /// Central differences that never straddle a region boundary.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Differential {
    pub d_rr: f64,
    pub d_ra: f64,
    pub d_ar: f64,
    pub d_aa: f64,
    /// Determinant of the meridional block.
    pub det: f64,
    pub azim: f64,
    pub r_img: f64,
    pub alpha_img: f64,
    pub at_point: SphericalPoint,
}

impl Differential {
    pub(crate) fn from_partials(at_point: SphericalPoint, q: Partials) -> Self {
        let azim = q.r_img * q.sin_alpha_img / (at_point.r * sin(at_point.alpha));
        Differential {
            d_rr: q.d_rr,
            d_ra: q.d_ra,
            d_ar: q.d_ar,
            d_aa: q.d_aa,
            det: q.det,
            azim,
            r_img: q.r_img,
            alpha_img: q.alpha_img,
            at_point,
        }
    }

    fn components(&self) -> [f64; 5] {
        [self.d_rr, self.d_ra, self.d_ar, self.d_aa, self.azim]
    }
}

fn check_off_axis(r: f64, alpha: f64) -> Result<()> {
    if !(r > 0.0) || !(alpha > 0.0 && alpha < PI) {
        return Err(Error::OnAxis);
    }
    Ok(())
}

pub fn partials<M: AxisymmetricMap + ?Sized>(
    map: &M,
    pt: SphericalPoint,
    mode: Mode,
) -> Result<Differential> {
    check_off_axis(pt.r, pt.alpha)?;
    match mode {
        Mode::Analytic => {
            let label = map.classify(pt.r, pt.alpha);
            if label.proximity <= BOUNDARY_EXCLUSION {
                return Err(Error::OnRegionBoundary {
                    proximity: label.proximity,
                });
            }
            Ok(Differential::from_partials(
                pt,
                map.analytic_partials(pt.r, pt.alpha)?,
            ))
        }
        Mode::FiniteDifference => finite_difference(map, pt),
    }
}

fn finite_difference<M: AxisymmetricMap + ?Sized>(
    map: &M,
    pt: SphericalPoint,
) -> Result<Differential> {
    let (r, a) = (pt.r, pt.alpha);
    let radius = map.domain_radius();
    if r >= radius {
        return Err(Error::OutsideDomain { r });
    }
    let prox = map.classify(r, a).proximity;
    let h = (1e-6 * r.max(1.0))
        .min(0.5 * prox)
        .min(0.5 * r)
        .min(0.5 * a)
        .min(0.5 * (PI - a))
        .min(0.5 * (radius - r));
    let f = |r: f64, a: f64| map.image(r, a);
    let (rp, ap) = f(r + h, a)?;
    let (rm, am) = f(r - h, a)?;
    let (rq, aq) = f(r, a + h)?;
    let (rn, an) = f(r, a - h)?;
    let (r0, a0) = f(r, a)?;
    let inv = 0.5 / h;
    Ok(Differential::from_partials(
        pt,
        Partials::new(
            r0,
            a0,
            (rp - rm) * inv,
            (rq - rn) * inv,
            (ap - am) * inv,
            (aq - an) * inv,
        ),
    ))
}

pub fn jacobian(d: &Differential) -> f64 {
    let p = d.at_point;
    d.det * d.azim * d.r_img / p.r
}

/// Squared Frobenius norm of the differential.
pub fn grad_norm_sq(d: &Differential) -> f64 {
    let r = d.at_point.r;
    let a = d.d_rr;
    let b = d.r_img * d.d_ar;
    let c = d.d_ra / r;
    let e = d.r_img * d.d_aa / r;
    a * a + b * b + c * c + e * e + d.azim * d.azim
}

/// `(|Df|^3 / J)^{1/2}`.
pub fn distortion_half(d: &Differential) -> Result<f64> {
    let j = jacobian(d);
    if !(j > 0.0) {
        return Err(Error::NonpositiveJacobian {
            value: j,
            r: d.at_point.r,
            alpha: d.at_point.alpha,
        });
    }
    let g = grad_norm_sq(d);
    Ok(sqrt(g * sqrt(g) / j))
}

/// Outcome of comparing analytic and finite-difference partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub points: usize,
    /// Largest disagreement, relative to the largest component at each point.
    pub max_relative: f64,
    pub worst_point: SphericalPoint,
}

/// Compares both differentiation modes at `n` quasi-random points spread
/// evenly over the map's patches, keeping only points farther than
/// `min_proximity` from every region boundary and from the axis.
pub fn check_derivatives<M: AxisymmetricMap + ?Sized>(
    map: &M,
    n: usize,
    min_proximity: f64,
    seed: u64,
) -> Result<DerivativeCheck> {
    let patches = map.patches();
    let mut halton = Halton::<2>::new(seed);
    let mut out = DerivativeCheck {
        points: 0,
        max_relative: 0.0,
        worst_point: SphericalPoint::new(0.0, 0.0, 0.0),
    };
    let mut k = 0usize;
    let mut attempts = 0usize;
    while out.points < n {
        attempts += 1;
        if attempts > 1000 * n.max(1) {
            break;
        }
        let patch = &patches[k % patches.len()];
        k += 1;
        let [u, v] = halton.next().unwrap_or([0.5, 0.5]);
        let r = patch.r_lo + u * (patch.r_hi - patch.r_lo);
        let lo = map.curve(patch.lower, r);
        let hi = map.curve(patch.upper, r);
        let a = lo + v * (hi - lo);
        if !(r > min_proximity && a > min_proximity && a < PI - min_proximity) {
            continue;
        }
        if r >= map.domain_radius() - min_proximity {
            continue;
        }
        if map.classify(r, a).proximity <= min_proximity {
            continue;
        }
        let pt = SphericalPoint::new(r, a, 0.0);
        let x = partials(map, pt, Mode::Analytic)?.components();
        let y = partials(map, pt, Mode::FiniteDifference)?.components();
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = x
            .iter()
            .zip(y.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let rel = diff / scale;
        if !(rel <= out.max_relative) {
            out.max_relative = rel;
            out.worst_point = pt;
        }
        out.points += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{
        AngleCurve, Grading, Identity, Patch, ReflectZ, Region, RegionLabel,
    };
    use crate::mapfamily::{make_params, FamilyMap, LimitMap};
    use approx::assert_relative_eq;

    struct Scaling;

    impl AxisymmetricMap for Scaling {
        fn domain_radius(&self) -> f64 {
            1.0
        }
        fn image(&self, r: f64, alpha: f64) -> Result<(f64, f64)> {
            Ok((2.0 * r, alpha))
        }
        fn classify(&self, _: f64, _: f64) -> RegionLabel {
            RegionLabel {
                region: Region::Whole,
                proximity: f64::INFINITY,
            }
        }
        fn analytic_partials(&self, r: f64, alpha: f64) -> Result<Partials> {
            Ok(Partials::new(2.0 * r, alpha, 2.0, 0.0, 0.0, 1.0))
        }
        fn patches(&self) -> alloc::vec::Vec<Patch> {
            alloc::vec![Patch {
                region: Region::Whole,
                r_lo: 0.0,
                r_hi: 1.0,
                lower: AngleCurve::Zero,
                upper: AngleCurve::Pi,
                grading: Grading::default(),
            }]
        }
    }

    fn pt(r: f64, a: f64) -> SphericalPoint {
        SphericalPoint::new(r, a, 0.3)
    }

    #[test]
    fn identity_differential() {
        let d = partials(&Identity { radius: 2.0 }, pt(0.7, 1.1), Mode::Analytic).unwrap();
        assert_eq!((d.d_rr, d.d_ra, d.d_ar, d.d_aa), (1.0, 0.0, 0.0, 1.0));
        assert_relative_eq!(d.azim, 1.0, max_relative = 1e-15);
        assert_relative_eq!(jacobian(&d), 1.0, max_relative = 1e-15);
        assert_relative_eq!(grad_norm_sq(&d), 3.0, max_relative = 1e-15);
        assert_relative_eq!(
            distortion_half(&d).unwrap(),
            2.279_507_056_954_777,
            max_relative = 1e-12
        );
    }

    #[test]
    fn reflection_flips_orientation() {
        let d = partials(&ReflectZ { radius: 2.0 }, pt(0.7, 1.1), Mode::Analytic).unwrap();
        assert_relative_eq!(jacobian(&d), -1.0, max_relative = 1e-15);
        assert!(matches!(
            distortion_half(&d),
            Err(Error::NonpositiveJacobian { .. })
        ));
    }

    #[test]
    fn scaling_is_conformal() {
        let d = partials(&Scaling, pt(0.4, 2.0), Mode::Analytic).unwrap();
        assert_relative_eq!(grad_norm_sq(&d), 12.0, max_relative = 1e-15);
        assert_relative_eq!(jacobian(&d), 8.0, max_relative = 1e-15);
        let id = partials(&Identity { radius: 2.0 }, pt(0.4, 2.0), Mode::Analytic).unwrap();
        assert_relative_eq!(
            distortion_half(&d).unwrap(),
            distortion_half(&id).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn axis_and_boundary_rejected() {
        let m = FamilyMap::new(make_params(0.1, 1.0, None).unwrap());
        assert_eq!(partials(&m, pt(1.0, 0.0), Mode::Analytic), Err(Error::OnAxis));
        assert_eq!(partials(&m, pt(0.0, 0.0), Mode::FiniteDifference), Err(Error::OnAxis));
        let s = crate::mapfamily::s_curve(m.params(), 1.0).unwrap();
        assert!(matches!(
            partials(&m, pt(1.0, s), Mode::Analytic),
            Err(Error::OnRegionBoundary { .. })
        ));
        assert!(partials(&m, pt(1.0, s), Mode::FiniteDifference).is_ok());
    }

    #[test]
    fn shell_radial_partial() {
        let m = FamilyMap::new(make_params(0.1, 1.0, None).unwrap());
        for &(r, a) in &[(3.0, 0.4), (6.5, 2.0), (9.9, 3.0)] {
            let d = partials(&m, pt(r, a), Mode::Analytic).unwrap();
            let t2 = core::f64::consts::FRAC_PI_2 * (1.0 - (a / PI).powf(m.params().p));
            assert_relative_eq!(d.d_rr, (10.0 - t2.cos()) / 8.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn frobenius_matches_finite_differences() {
        let m = FamilyMap::new(make_params(0.1, 1.0, None).unwrap());
        let a = partials(&m, pt(1.5, 1.0), Mode::Analytic).unwrap();
        let f = partials(&m, pt(1.5, 1.0), Mode::FiniteDifference).unwrap();
        let g = grad_norm_sq(&a);
        assert!(g.is_finite() && g > 0.0);
        assert_relative_eq!(g, grad_norm_sq(&f), max_relative = 1e-4);
    }

    #[test]
    fn analytic_matches_finite_differences() {
        for eps in [0.4, 0.1, 0.025] {
            let m = FamilyMap::new(make_params(eps, 1.0, None).unwrap());
            let c = check_derivatives(&m, 400, 1e-3, 11).unwrap();
            assert_eq!(c.points, 400);
            assert!(c.max_relative < 1e-5, "eps {eps}: {c:?}");
        }
        let l = LimitMap::new(7.0 / 12.0);
        let c = check_derivatives(&l, 300, 1e-3, 5).unwrap();
        assert!(c.max_relative < 1e-5, "limit: {c:?}");
    }

    #[test]
    fn jacobian_positive_on_family() {
        let m = FamilyMap::new(make_params(0.1, 1.0, None).unwrap());
        let mut h = Halton::<2>::new(3);
        for _ in 0..5000 {
            let [u, v] = h.next().unwrap();
            let r = 1e-3 + u * (10.0 - 2e-3);
            let a = 1e-3 + v * (PI - 2e-3);
            if m.classify(r, a).proximity <= BOUNDARY_EXCLUSION {
                continue;
            }
            let d = partials(&m, pt(r, a), Mode::Analytic).unwrap();
            let j = jacobian(&d);
            assert!(j > 0.0, "J = {j} at r = {r}, alpha = {a}");
            assert_relative_eq!(
                distortion_half(&d).unwrap(),
                grad_norm_sq(&d).powf(0.75) / j.sqrt(),
                max_relative = 1e-12
            );
        }
    }
}
