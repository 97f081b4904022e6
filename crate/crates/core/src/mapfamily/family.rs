use alloc::vec::Vec;

use super::fields::{shell, Fields};
use super::params::MapParams;
use crate::geometry::{CartesianPoint, SphericalPoint};
use crate::map::{
    check_radius, AngleCurve, AxisymmetricMap, Grading, LocalT, Partials, Patch, Region,
    RegionLabel,
};
use crate::Result;

/// Radius of the domain ball of the family.
pub const DOMAIN_RADIUS: f64 = 10.0;

/// The family member `f_ε`, orientation-normalized so that it is the
/// identity on the outer sphere and has positive Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyMap {
    params: MapParams,
    fields: Fields,
}

/// The pointwise limit of `f_ε` as `ε -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitMap {
    p: f64,
    fields: Fields,
}

impl FamilyMap {
    pub fn new(params: MapParams) -> Self {
        FamilyMap {
            params,
            fields: Fields::new(&params),
        }
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }
}

impl LimitMap {
    pub fn new(p: f64) -> Self {
        LimitMap {
            p,
            fields: Fields::limit(p),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

fn partials(f: &Fields, r: f64, alpha: f64) -> Result<Partials> {
    check_radius(r, DOMAIN_RADIUS)?;
    Ok(if r < 2.0 {
        f.inner(r, alpha)
    } else {
        shell(f.p(), r, alpha)
    })
}

fn local(f: &Fields, patch: &Patch, r: f64, t: LocalT, lo: f64, hi: f64) -> Result<(f64, Partials)> {
    if patch.region == Region::Shell || r >= 2.0 {
        let alpha = t.alpha(lo, hi);
        return Ok((alpha, partials(f, r, alpha)?));
    }
    check_radius(r, DOMAIN_RADIUS)?;
    Ok(f.inner_local(patch.region, r, t, lo, hi))
}

fn image(f: &Fields, r: f64, alpha: f64) -> Result<(f64, f64)> {
    let q = partials(f, r, alpha)?;
    Ok((q.r_img, q.alpha_img))
}

fn curve(f: &Fields, c: AngleCurve, r: f64) -> f64 {
    match c {
        AngleCurve::Zero => 0.0,
        AngleCurve::Pi => crate::math::PI,
        AngleCurve::StripLower => f.s_tilde(r).0,
        AngleCurve::StripUpper => f.s(r).0,
    }
}

fn family_patches(f: &Fields, with_strip: bool) -> Vec<Patch> {
    use AngleCurve::*;
    let g = |r_lo, r_hi, t_lo, t_hi| Grading {
        r_lo,
        r_hi,
        t_lo,
        t_hi,
    };
    let mut out = Vec::new();
    let band = |out: &mut Vec<Patch>, lo: f64, hi: f64, upper: bool, grade_lo: bool, grade_hi: bool| {
        let (a, b, d) = if upper {
            (Region::A2, Region::C, Region::D2)
        } else {
            (Region::A1, Region::B, Region::D1)
        };
        let (a_hi, d_lo) = if with_strip {
            (StripLower, StripUpper)
        } else {
            (StripUpper, StripUpper)
        };
        out.push(Patch {
            region: a,
            r_lo: lo,
            r_hi: hi,
            lower: Zero,
            upper: a_hi,
            grading: g(grade_lo, grade_hi, true, true),
        });
        if with_strip {
            out.push(Patch {
                region: b,
                r_lo: lo,
                r_hi: hi,
                lower: StripLower,
                upper: StripUpper,
                grading: g(grade_lo, grade_hi, false, false),
            });
        }
        if upper || with_strip {
            out.push(Patch {
                region: d,
                r_lo: lo,
                r_hi: hi,
                lower: d_lo,
                upper: Pi,
                grading: g(grade_lo, grade_hi, true, true),
            });
        }
    };
    if f.r0 > 0.0 {
        band(&mut out, 0.0, f.r0, false, false, true);
        band(&mut out, f.r0, f.r1, false, true, false);
    } else {
        band(&mut out, 0.0, f.r1, false, false, false);
    }
    band(&mut out, f.r1, 2.0, true, false, true);
    out.push(Patch {
        region: Region::Shell,
        r_lo: 2.0,
        r_hi: DOMAIN_RADIUS,
        lower: Zero,
        upper: Pi,
        grading: g(true, false, true, true),
    });
    out
}

impl AxisymmetricMap for FamilyMap {
    fn domain_radius(&self) -> f64 {
        DOMAIN_RADIUS
    }

    fn image(&self, r: f64, alpha: f64) -> Result<(f64, f64)> {
        image(&self.fields, r, alpha)
    }

    fn classify(&self, r: f64, alpha: f64) -> RegionLabel {
        self.fields.label(r, alpha)
    }

    fn analytic_partials(&self, r: f64, alpha: f64) -> Result<Partials> {
        partials(&self.fields, r, alpha)
    }

    fn patches(&self) -> Vec<Patch> {
        family_patches(&self.fields, true)
    }

    fn local_partials(&self, patch: &Patch, r: f64, t: LocalT, lo: f64, hi: f64) -> Result<(f64, Partials)> {
        local(&self.fields, patch, r, t, lo, hi)
    }

    fn curve(&self, c: AngleCurve, r: f64) -> f64 {
        curve(&self.fields, c, r)
    }
}

impl AxisymmetricMap for LimitMap {
    fn domain_radius(&self) -> f64 {
        DOMAIN_RADIUS
    }

    fn image(&self, r: f64, alpha: f64) -> Result<(f64, f64)> {
        image(&self.fields, r, alpha)
    }

    fn classify(&self, r: f64, alpha: f64) -> RegionLabel {
        self.fields.label(r, alpha)
    }

    fn analytic_partials(&self, r: f64, alpha: f64) -> Result<Partials> {
        partials(&self.fields, r, alpha)
    }

    fn patches(&self) -> Vec<Patch> {
        family_patches(&self.fields, false)
    }

    fn local_partials(&self, patch: &Patch, r: f64, t: LocalT, lo: f64, hi: f64) -> Result<(f64, Partials)> {
        local(&self.fields, patch, r, t, lo, hi)
    }

    fn curve(&self, c: AngleCurve, r: f64) -> f64 {
        curve(&self.fields, c, r)
    }
}

/// Evaluates `f_ε` at a point of `B(0, 10)`.
pub fn eval_family(params: &MapParams, p: SphericalPoint) -> Result<CartesianPoint> {
    FamilyMap::new(*params).eval(p)
}

/// Evaluates the limit map with Hölder exponent `p_exponent`.
pub fn eval_limit(p_exponent: f64, pt: SphericalPoint) -> Result<CartesianPoint> {
    LimitMap::new(p_exponent).eval(pt)
}

/// Regions present in the patch decomposition of a map, sorted.
pub fn region_list(map: &impl AxisymmetricMap) -> Vec<Region> {
    let mut v: Vec<Region> = map.patches().iter().map(|p| p.region).collect();
    v.sort();
    v.dedup();
    v
}
