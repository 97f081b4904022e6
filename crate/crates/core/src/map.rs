//! Rotationally symmetric maps of a ball and their region structure.
//!
//! A map is axisymmetric when, in spherical coordinates, it has the form
//! `(r, α, β) -> (r̃(r, α), α̃(r, α), β)`. Everything downstream (energies,
//! degree, sampling) only needs the two scalar components and their partials.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{to_cartesian, to_spherical, CartesianPoint, SphericalPoint};
use crate::math::{sin, PI};
use crate::{Error, Result};

/// Named pieces of the `(r, α)` half-plane on which a map has one closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    A1,
    A2,
    B,
    C,
    D1,
    D2,
    Shell,
    /// The single region of a map without internal structure.
    Whole,
}

impl Region {
    pub const FAMILY: [Region; 7] = [
        Region::A1,
        Region::A2,
        Region::B,
        Region::C,
        Region::D1,
        Region::D2,
        Region::Shell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::A1 => "A1",
            Region::A2 => "A2",
            Region::B => "B",
            Region::C => "C",
            Region::D1 => "D1",
            Region::D2 => "D2",
            Region::Shell => "Shell",
            Region::Whole => "Whole",
        }
    }
}

/// Region of a point together with its distance to the nearest region boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionLabel {
    pub region: Region,
    pub proximity: f64,
}

/// Curves bounding a patch in the angular direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleCurve {
    Zero,
    Pi,
    /// Lower edge of the strip, `α = S̃(r)`.
    StripLower,
    /// Upper edge of the strip, `α = S(r)`.
    StripUpper,
}

/// Edges of a patch toward which quadrature cells are geometrically graded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Grading {
    pub r_lo: bool,
    pub r_hi: bool,
    pub t_lo: bool,
    pub t_hi: bool,
}

/// A curvilinear patch `r_lo < r < r_hi`, `lower(r) < α < upper(r)` on which
/// the map is given by a single smooth formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    pub region: Region,
    pub r_lo: f64,
    pub r_hi: f64,
    pub lower: AngleCurve,
    pub upper: AngleCurve,
    pub grading: Grading,
}

/// A patch coordinate `t ∈ [0, 1]` stored together with `1 - t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalT {
    pub t: f64,
    pub comp: f64,
}

impl LocalT {
    pub fn new(t: f64) -> Self {
        LocalT { t, comp: 1.0 - t }
    }

    /// The coordinate at distance `gap` below `t = 1`.
    pub fn from_top(gap: f64) -> Self {
        LocalT { t: 1.0 - gap, comp: gap }
    }

    pub fn alpha(self, lo: f64, hi: f64) -> f64 {
        if self.t <= 0.5 {
            lo + self.t * (hi - lo)
        } else {
            hi - self.comp * (hi - lo)
        }
    }
}

/// First partials of `(r̃, α̃)` with respect to `(r, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub r_img: f64,
    pub alpha_img: f64,
    pub d_rr: f64,
    pub d_ra: f64,
    pub d_ar: f64,
    pub d_aa: f64,
    /// `d_rr d_aa - d_ra d_ar`, which maps may supply in a cancellation-free form.
    pub det: f64,
    /// `sin α̃`, accurate also when `α̃` is within rounding of `0` or `π`.
    pub sin_alpha_img: f64,
}

impl Partials {
    /// Partials with the determinant and `sin α̃` formed directly.
    pub fn new(r_img: f64, alpha_img: f64, d_rr: f64, d_ra: f64, d_ar: f64, d_aa: f64) -> Self {
        Partials {
            r_img,
            alpha_img,
            d_rr,
            d_ra,
            d_ar,
            d_aa,
            det: d_rr * d_aa - d_ra * d_ar,
            sin_alpha_img: sin(alpha_img),
        }
    }
}

pub trait AxisymmetricMap: Sync {
    /// Radius of the domain ball centered at the origin.
    fn domain_radius(&self) -> f64;

    /// Image radius and polar angle of `(r, α)`; the azimuth is preserved.
    fn image(&self, r: f64, alpha: f64) -> Result<(f64, f64)>;

    fn classify(&self, r: f64, alpha: f64) -> RegionLabel;

    /// Closed-form partial derivatives at an interior point of a region.
    fn analytic_partials(&self, r: f64, alpha: f64) -> Result<Partials>;

    /// Decomposition of `(0, R) x (0, π)` into smooth patches.
    fn patches(&self) -> Vec<Patch>;

    /// Evaluates a bounding curve of a patch at radius `r`.
    fn curve(&self, c: AngleCurve, _r: f64) -> f64 {
        match c {
            AngleCurve::Zero => 0.0,
            AngleCurve::Pi => PI,
            AngleCurve::StripLower | AngleCurve::StripUpper => f64::NAN,
        }
    }

    /// Partials at patch coordinates `(r, t)`, where `α = lo + t (hi - lo)`
    /// and `lo`, `hi` are the patch's bounding curves at `r`. The caller
    /// passes `t` together with `1 - t` so that both ends of the patch are
    /// resolved to full precision. Returns `α` together with the partials.
    fn local_partials(&self, patch: &Patch, r: f64, t: LocalT, lo: f64, hi: f64) -> Result<(f64, Partials)> {
        let _ = patch;
        let alpha = t.alpha(lo, hi);
        Ok((alpha, self.analytic_partials(r, alpha)?))
    }

    fn eval(&self, p: SphericalPoint) -> Result<CartesianPoint> {
        let (ri, ai) = self.image(p.r, p.alpha)?;
        Ok(to_cartesian(SphericalPoint::new(ri, ai, p.beta)))
    }

    fn apply(&self, c: CartesianPoint) -> Result<CartesianPoint> {
        self.eval(to_spherical(c))
    }
}

pub(crate) fn check_radius(r: f64, radius: f64) -> Result<()> {
    if !(r >= 0.0 && r <= radius) {
        return Err(Error::OutsideDomain { r });
    }
    Ok(())
}

/// The identity on `B(0, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identity {
    pub radius: f64,
}

impl AxisymmetricMap for Identity {
    fn domain_radius(&self) -> f64 {
        self.radius
    }

    fn image(&self, r: f64, alpha: f64) -> Result<(f64, f64)> {
        check_radius(r, self.radius)?;
        Ok((r, alpha))
    }

    fn classify(&self, _r: f64, _alpha: f64) -> RegionLabel {
        RegionLabel {
            region: Region::Whole,
            proximity: f64::INFINITY,
        }
    }

    fn analytic_partials(&self, r: f64, alpha: f64) -> Result<Partials> {
        check_radius(r, self.radius)?;
        Ok(Partials::new(r, alpha, 1.0, 0.0, 0.0, 1.0))
    }

    fn patches(&self) -> Vec<Patch> {
        vec![whole_patch(self.radius)]
    }
}

/// The reflection `z -> -z` on `B(0, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectZ {
    pub radius: f64,
}

impl AxisymmetricMap for ReflectZ {
    fn domain_radius(&self) -> f64 {
        self.radius
    }

    fn image(&self, r: f64, alpha: f64) -> Result<(f64, f64)> {
        check_radius(r, self.radius)?;
        Ok((r, PI - alpha))
    }

    fn classify(&self, _r: f64, _alpha: f64) -> RegionLabel {
        RegionLabel {
            region: Region::Whole,
            proximity: f64::INFINITY,
        }
    }

    fn analytic_partials(&self, r: f64, alpha: f64) -> Result<Partials> {
        check_radius(r, self.radius)?;
        Ok(Partials::new(r, PI - alpha, 1.0, 0.0, 0.0, -1.0))
    }

    fn patches(&self) -> Vec<Patch> {
        vec![whole_patch(self.radius)]
    }
}

fn whole_patch(radius: f64) -> Patch {
    Patch {
        region: Region::Whole,
        r_lo: 0.0,
        r_hi: radius,
        lower: AngleCurve::Zero,
        upper: AngleCurve::Pi,
        grading: Grading::default(),
    }
}

/// Adapts a closure on Cartesian points to [`PointMap`].
pub struct FnMap<F>(pub F);

/// A map of Cartesian points, used for pushing meshes forward.
pub trait PointMap: Sync {
    fn map_point(&self, c: CartesianPoint) -> Result<CartesianPoint>;
}

impl<M: AxisymmetricMap> PointMap for M {
    fn map_point(&self, c: CartesianPoint) -> Result<CartesianPoint> {
        self.apply(c)
    }
}

impl<F> PointMap for FnMap<F>
where
    F: Fn(CartesianPoint) -> Result<CartesianPoint> + Sync,
{
    fn map_point(&self, c: CartesianPoint) -> Result<CartesianPoint> {
        (self.0)(c)
    }
}
