//! Scalar fields `S`, `δ`, `ψ`, `ξ`, `R`, `T` on the `(r, α)` half-plane.

use alloc::format;

use super::params::MapParams;
use crate::map::{LocalT, Partials, Region, RegionLabel};
use crate::math::{cos, pow, sin, sqrt, FRAC_PI_2, PI};
use crate::{Error, Result};

/// Value and first partials of a scalar field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub v: f64,
    pub dr: f64,
    pub da: f64,
}

impl Jet {
    const ZERO: Jet = Jet {
        v: 0.0,
        dr: 0.0,
        da: 0.0,
    };
}

/// Precomputed constants for evaluating the fields; `eps = 0` gives the limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Fields {
    eps: f64,
    p: f64,
    lambda: f64,
    c0: f64,
    pub(crate) r0: f64,
    pub(crate) r1: f64,
    /// `ε^{1/p}`.
    root: f64,
    /// `((π-2ε)/(π-ε))^{1-λp}`.
    psi_k: f64,
    /// `sqrt((π-2ε)/(π-ε))`.
    a2_scale: f64,
}

impl Fields {
    pub(crate) fn new(m: &MapParams) -> Self {
        let q = (PI - 2.0 * m.eps) / (PI - m.eps);
        Fields {
            eps: m.eps,
            p: m.p,
            lambda: m.lambda,
            c0: m.c0,
            r0: m.r0,
            r1: m.r1,
            root: pow(m.eps, 1.0 / m.p),
            psi_k: pow(q, 1.0 - m.lambda * m.p),
            a2_scale: sqrt(q),
        }
    }

    pub(crate) fn limit(p: f64) -> Self {
        Fields {
            eps: 0.0,
            p,
            lambda: 4.0,
            c0: 1.0,
            r0: 0.0,
            r1: 1.0,
            root: 0.0,
            psi_k: 1.0,
            a2_scale: 1.0,
        }
    }

    pub(crate) fn p(&self) -> f64 {
        self.p
    }

    /// Upper strip edge `S(r)` and its derivative.
    pub(crate) fn s(&self, r: f64) -> (f64, f64) {
        if r < self.r1 {
            (PI - self.eps * r, -self.eps)
        } else {
            ((2.0 - r) * PI, -PI)
        }
    }

    /// Strip thickness `δ(r)` and its derivative.
    pub(crate) fn delta(&self, r: f64) -> (f64, f64) {
        if r < self.r1 {
            (self.root * r, self.root)
        } else {
            let v = self.c0 * self.root * pow(2.0 - r, self.lambda);
            let d = if v == 0.0 {
                0.0
            } else {
                -self.lambda * v / (2.0 - r)
            };
            (v, d)
        }
    }

    /// Lower strip edge `S̃ = S - δ` and its derivative.
    pub(crate) fn s_tilde(&self, r: f64) -> (f64, f64) {
        let (s, ds) = self.s(r);
        let (d, dd) = self.delta(r);
        (s - d, ds - dd)
    }

    /// `1 - ψ(r)`, computed without cancellation.
    pub(crate) fn psi_gap(&self, r: f64) -> f64 {
        if r <= self.r0 {
            if self.eps > 0.0 {
                1.0 - r / self.eps
            } else {
                1.0
            }
        } else if r <= self.r1 {
            self.eps * (2.0 - r)
        } else {
            self.psi_k * self.eps * pow(2.0 - r, self.lambda * self.p)
        }
    }

    pub(crate) fn psi(&self, r: f64) -> (f64, f64) {
        if r <= self.r0 {
            if self.eps > 0.0 {
                (r / self.eps, 1.0 / self.eps)
            } else {
                (0.0, 0.0)
            }
        } else if r <= self.r1 {
            (1.0 - self.eps * (2.0 - r), self.eps)
        } else {
            let e = self.lambda * self.p;
            let t = self.psi_k * self.eps * pow(2.0 - r, e - 1.0);
            (1.0 - t * (2.0 - r), t * e)
        }
    }

    /// Region of a point with `0 <= r < 2`; boundary points go to the lower region.
    pub(crate) fn region(&self, r: f64, alpha: f64) -> Region {
        let upper = r > self.r1;
        if alpha <= self.s_tilde(r).0 {
            if upper {
                Region::A2
            } else {
                Region::A1
            }
        } else if alpha <= self.s(r).0 {
            if upper {
                Region::C
            } else {
                Region::B
            }
        } else if upper {
            Region::D2
        } else {
            Region::D1
        }
    }

    /// Distance in the `(r, α)` plane to the nearest region boundary.
    pub(crate) fn proximity(&self, r: f64, alpha: f64) -> f64 {
        let (s, ds) = self.s(r);
        let (st, dst) = self.s_tilde(r);
        let mut d = (alpha - s).abs() / sqrt(1.0 + ds * ds);
        d = d.min((alpha - st).abs() / sqrt(1.0 + dst * dst));
        if self.eps > 0.0 {
            d = d.min((r - self.r0).abs());
        }
        d.min((r - self.r1).abs()).min((r - 2.0).abs())
    }

    /// `ξ` and its partials; `exact` overrides the value when the caller
    /// knows it more accurately than `alpha` can represent.
    pub(crate) fn xi(&self, r: f64, alpha: f64, region: Region, exact: Option<f64>) -> Jet {
        match region {
            Region::A1 | Region::A2 => {
                let (st, dst) = self.s_tilde(r);
                Jet {
                    v: exact.unwrap_or_else(|| 1.0 - alpha / st),
                    dr: alpha * dst / (st * st),
                    da: -1.0 / st,
                }
            }
            Region::D1 | Region::D2 => {
                let (s, ds) = self.s(r);
                let w = PI - s;
                Jet {
                    v: exact.unwrap_or_else(|| 1.0 - (PI - alpha) / w),
                    dr: -(PI - alpha) * ds / (w * w),
                    da: 1.0 / w,
                }
            }
            _ => Jet::ZERO,
        }
    }

    /// `R` and its partials; `exact` overrides the strip weight `(S - α)/δ`.
    pub(crate) fn radius(&self, r: f64, alpha: f64, region: Region, exact: Option<f64>) -> Jet {
        let a1 = || ((2.0 - r) / 3.0, -1.0 / 3.0);
        let a2 = || {
            let s = sqrt(2.0 - r);
            (self.a2_scale * s / 3.0, -self.a2_scale / (6.0 * s))
        };
        let d1 = || (2.0 / 3.0 + self.eps * r / (3.0 * PI), self.eps / (3.0 * PI));
        let d2 = || ((1.0 + r) / 3.0, 1.0 / 3.0);
        let single = |(v, dr): (f64, f64)| Jet { v, dr, da: 0.0 };
        let blend = |(va, dra): (f64, f64), (vd, drd): (f64, f64)| {
            let (s, ds) = self.s(r);
            let (d, dd) = self.delta(r);
            let u = exact.unwrap_or_else(|| (s - alpha) / d);
            let u_r = (ds * d - (s - alpha) * dd) / (d * d);
            let u_a = -1.0 / d;
            Jet {
                v: u * va + (1.0 - u) * vd,
                dr: u * dra + (1.0 - u) * drd + (va - vd) * u_r,
                da: (va - vd) * u_a,
            }
        };
        match region {
            Region::A1 => single(a1()),
            Region::A2 => single(a2()),
            Region::D1 => single(d1()),
            Region::D2 => single(d2()),
            Region::B => blend(a1(), d1()),
            Region::C => blend(a2(), d2()),
            Region::Shell | Region::Whole => Jet::ZERO,
        }
    }

    pub(crate) fn angle(&self, r: f64, alpha: f64, region: Region, exact: Option<f64>) -> Jet {
        let xi = self.xi(r, alpha, region, exact);
        let (psi, dpsi) = self.psi(r);
        let xp = pow(xi.v, self.p);
        let g = if xi.v > 0.0 {
            self.p * pow(xi.v, self.p - 1.0)
        } else {
            0.0
        };
        Jet {
            v: FRAC_PI_2 * (1.0 - xp) * psi,
            dr: -FRAC_PI_2 * g * xi.dr * psi + FRAC_PI_2 * (1.0 - xp) * dpsi,
            da: -FRAC_PI_2 * g * xi.da * psi,
        }
    }

    /// Image `(R cos T, π - R T)` of a point with `0 <= r < 2` and its partials.
    pub(crate) fn inner(&self, r: f64, alpha: f64) -> Partials {
        self.inner_in(self.region(r, alpha), r, alpha, None)
    }

    /// Same as [`Fields::inner`] for the point with patch coordinate `t`
    /// in `region`, where `α = lo + t (hi - lo)`. The profile `ξ` (or the
    /// strip weight) is taken from `t` directly, which stays accurate where
    /// the strip is thinner than the spacing of floating-point angles.
    pub(crate) fn inner_local(&self, region: Region, r: f64, t: LocalT, lo: f64, hi: f64) -> (f64, Partials) {
        let alpha = t.alpha(lo, hi);
        let exact = match region {
            Region::A1 | Region::A2 | Region::B | Region::C => t.comp,
            _ => t.t,
        };
        (alpha, self.inner_in(region, r, alpha, Some(exact)))
    }

    fn inner_in(&self, region: Region, r: f64, alpha: f64, exact: Option<f64>) -> Partials {
        let (xi_exact, u_exact) = match region {
            Region::B | Region::C => (None, exact),
            _ => (exact, None),
        };
        let rr = self.radius(r, alpha, region, u_exact);
        let t = self.angle(r, alpha, region, xi_exact);
        let xi = self.xi(r, alpha, region, xi_exact).v;
        let psi = self.psi(r).0;
        let complement = FRAC_PI_2 * (self.psi_gap(r) + pow(xi, self.p) * psi);
        let (c, s) = (sin(complement), cos(complement));
        let turn = rr.v * t.v;
        Partials {
            r_img: rr.v * c,
            alpha_img: PI - turn,
            d_rr: rr.dr * c - rr.v * s * t.dr,
            d_ra: rr.da * c - rr.v * s * t.da,
            d_ar: -(rr.dr * t.v + rr.v * t.dr),
            d_aa: -(rr.da * t.v + rr.v * t.da),
            det: -rr.v * (c + s * t.v) * (rr.dr * t.da - rr.da * t.dr),
            sin_alpha_img: sin(turn),
        }
    }

    pub(crate) fn label(&self, r: f64, alpha: f64) -> RegionLabel {
        if r >= 2.0 {
            return RegionLabel {
                region: Region::Shell,
                proximity: r - 2.0,
            };
        }
        RegionLabel {
            region: self.region(r, alpha),
            proximity: self.proximity(r, alpha),
        }
    }
}

/// Image `(r̃, α̃)` of a shell point `2 <= r <= 10` and its partials.
pub(crate) fn shell(p: f64, r: f64, alpha: f64) -> Partials {
    let w = (r - 2.0) / 8.0;
    let x = alpha / PI;
    let xp = pow(x, p);
    let t2 = FRAC_PI_2 * (1.0 - xp);
    let dt2 = if alpha > 0.0 {
        -FRAC_PI_2 * p * pow(x, p - 1.0) / PI
    } else {
        f64::NEG_INFINITY
    };
    let (c, s) = (sin(FRAC_PI_2 * xp), cos(FRAC_PI_2 * xp));
    let (m, m_w, m_a) = if w > 0.0 {
        let q = w + alpha;
        (w / q, alpha / (q * q), -w / (q * q))
    } else {
        (0.0, 0.0, 0.0)
    };
    let big_w = w + (1.0 - w) * m;
    let w_r = (1.0 - m + (1.0 - w) * m_w) / 8.0;
    let w_a = (1.0 - w) * m_a;
    let gap = PI - alpha - t2;
    let a_pre = t2 + big_w * gap;
    let d_aa = if alpha > 0.0 {
        dt2 + w_a * gap - big_w * (1.0 + dt2)
    } else {
        f64::NAN
    };
    let d_ra = if alpha > 0.0 {
        -(1.0 - w) * s * dt2
    } else {
        f64::NAN
    };
    let mut q = Partials::new(
        10.0 * w + (1.0 - w) * c,
        PI - a_pre,
        (10.0 - c) / 8.0,
        d_ra,
        -w_r * gap,
        -d_aa,
    );
    q.sin_alpha_img = sin(a_pre);
    q
}

fn check_inner_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::InvalidParameter(format!("r = {r} outside (0, 2)")));
    }
    Ok(())
}

/// The curve `W`: upper edge `S(r)` of the strip.
pub fn s_curve(params: &MapParams, r: f64) -> Result<f64> {
    check_inner_radius(r)?;
    Ok(Fields::new(params).s(r).0)
}

/// Strip thickness `δ(ε, r)`.
pub fn thickness(params: &MapParams, r: f64) -> Result<f64> {
    check_inner_radius(r)?;
    Ok(Fields::new(params).delta(r).0)
}

/// Angular amplitude `ψ(ε, r)` on `[0, 2]`.
pub fn psi(params: &MapParams, r: f64) -> f64 {
    Fields::new(params).psi(r.clamp(0.0, 2.0)).0
}

/// Angular profile `ξ(r, α)`: one on the axis, zero on the strip.
pub fn xi(params: &MapParams, r: f64, alpha: f64) -> f64 {
    let f = Fields::new(params);
    f.xi(r, alpha, f.region(r, alpha), None).v
}

pub fn classify(params: &MapParams, r: f64, alpha: f64) -> RegionLabel {
    Fields::new(params).label(r, alpha)
}

/// Image radius profile `R(r, α)` on `(0, 2) x [0, π]`.
pub fn radius_field(params: &MapParams, r: f64, alpha: f64) -> f64 {
    let f = Fields::new(params);
    f.radius(r, alpha, f.region(r, alpha), None).v
}

/// Image angle profile `T(r, α)` on `(0, 2) x [0, π]`.
pub fn angle_field(params: &MapParams, r: f64, alpha: f64) -> f64 {
    let f = Fields::new(params);
    f.angle(r, alpha, f.region(r, alpha), None).v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapfamily::params::make_params;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn m() -> MapParams {
        make_params(0.1, 1.0, None).unwrap()
    }

    #[test]
    fn strip_curve_values() {
        let m = m();
        assert_relative_eq!(s_curve(&m, 1.0).unwrap(), PI - 0.1, max_relative = 1e-15);
        assert!(s_curve(&m, 2.0 - 1e-12).unwrap() < 1e-10);
        let f = Fields::new(&m);
        let below = PI - m.eps * m.r1;
        let above = (2.0 - m.r1) * PI;
        assert_abs_diff_eq!(below, above, epsilon = 1e-12);
        assert_abs_diff_eq!(f.s(m.r1).0, below, epsilon = 1e-12);
        assert!(s_curve(&m, 0.0).is_err());
        assert!(s_curve(&m, 2.0).is_err());
    }

    #[test]
    fn thickness_values() {
        let m = m();
        assert_relative_eq!(thickness(&m, 1.0).unwrap(), pow(0.1, 12.0 / 7.0), max_relative = 1e-12);
        assert_relative_eq!(thickness(&m, 1.0).unwrap(), 0.019_307, max_relative = 1e-4);
        assert!(thickness(&m, 2.0 - 1e-6).unwrap() < 1e-40);
        let f = Fields::new(&m);
        let left = f.root * m.r1;
        let right = m.c0 * f.root * pow(2.0 - m.r1, m.lambda);
        assert_relative_eq!(left, right, max_relative = 1e-10);
    }

    #[test]
    fn psi_values() {
        let m = m();
        assert_relative_eq!(psi(&m, 0.05), 0.5, max_relative = 1e-14);
        assert_relative_eq!(psi(&m, 1.0), 0.9, max_relative = 1e-14);
        assert_eq!(psi(&m, 2.0), 1.0);
        assert_eq!(psi(&m, 0.0), 0.0);
        let f = Fields::new(&m);
        assert_abs_diff_eq!(m.r0 / m.eps, 1.0 - m.eps * (2.0 - m.r0), epsilon = 1e-14);
        let third = 1.0 - f.psi_k * m.eps * pow(2.0 - m.r1, m.lambda * m.p);
        assert_abs_diff_eq!(third, 1.0 - m.eps * (2.0 - m.r1), epsilon = 1e-12);
    }

    #[test]
    fn xi_values() {
        let m = m();
        assert_eq!(xi(&m, 1.0, 0.0), 1.0);
        assert_abs_diff_eq!(xi(&m, 1.0, PI), 1.0, epsilon = 1e-15);
        assert_relative_eq!(xi(&m, 1.0, PI - 0.05), 0.5, max_relative = 1e-12);
        let f = Fields::new(&m);
        let s = f.s(1.0).0;
        assert_eq!(xi(&m, 1.0, s - 1e-3), 0.0);
    }

    #[test]
    fn classification_examples() {
        let m = m();
        assert_eq!(classify(&m, 0.5, 1.0).region, Region::A1);
        let f = Fields::new(&m);
        let mid = (2.0 - 1.5) * PI - f.delta(1.5).0 / 2.0;
        assert_eq!(classify(&m, 1.5, mid).region, Region::C);
        assert_eq!(classify(&m, 5.0, 0.3).region, Region::Shell);
        assert_eq!(classify(&m, 1.0, PI - 0.11).region, Region::B);
        assert_eq!(classify(&m, 1.0, PI - 0.05).region, Region::D1);
        assert_eq!(classify(&m, 1.5, 3.0).region, Region::D2);
        assert_eq!(classify(&m, 1.5, 0.5).region, Region::A2);
        let s = f.s(1.0).0;
        assert_eq!(classify(&m, 1.0, s).region, Region::B);
        assert_eq!(classify(&m, m.r1, 1.0).region, Region::A1);
    }

    #[test]
    fn radius_values() {
        let m = m();
        assert_relative_eq!(radius_field(&m, 0.5, 1.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(radius_field(&m, 2.0 - 1e-13, 3.0), 1.0, max_relative = 1e-12);
        let s = s_curve(&m, 1.0).unwrap();
        assert_relative_eq!(
            radius_field(&m, 1.0, s),
            2.0 / 3.0 + 0.1 / (3.0 * PI),
            max_relative = 1e-14
        );
        assert_abs_diff_eq!(radius_field(&m, 1.0, s), 0.677_27, epsilon = 1e-5);
    }

    #[test]
    fn angle_values() {
        let m = m();
        assert_eq!(angle_field(&m, 1.0, 0.0), 0.0);
        let f = Fields::new(&m);
        let mid = |r: f64| f.s(r).0 - 0.5 * f.delta(r).0;
        assert_relative_eq!(angle_field(&m, 1.0, mid(1.0)), FRAC_PI_2 * 0.9, max_relative = 1e-14);
        assert_relative_eq!(angle_field(&m, 1.0, mid(1.0)), 1.413_72, max_relative = 1e-5);
        assert_relative_eq!(angle_field(&m, 0.05, mid(0.05)), FRAC_PI_2 * 0.5, max_relative = 1e-14);
        assert_abs_diff_eq!(angle_field(&m, 1.0, PI), 0.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn pointwise_ranges(eps in 0.01f64..=0.4, r in 1e-6f64..(2.0 - 1e-6), alpha in 0.0f64..=PI) {
            let m = make_params(eps, 1.0, None).unwrap();
            let big_r = radius_field(&m, r, alpha);
            let t = angle_field(&m, r, alpha);
            prop_assert!(big_r > 0.0 && big_r <= 1.0);
            prop_assert!((0.0..=FRAC_PI_2).contains(&t));
            prop_assert!(big_r * t <= FRAC_PI_2);
            let x = xi(&m, r, alpha);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&x));
            let d = thickness(&m, r).unwrap();
            prop_assert!(d > 0.0 || r > 1.9);
            prop_assert!(d < s_curve(&m, r).unwrap());
        }

        #[test]
        fn fields_continuous_across_strip_edges(eps in 0.01f64..=0.4, r in 0.01f64..1.8, side in 0usize..2) {
            let m = make_params(eps, 1.0, None).unwrap();
            let f = Fields::new(&m);
            let edge = if side == 0 { f.s_tilde(r).0 } else { f.s(r).0 };
            let h = 1e-9 * f.delta(r).0;
            for g in [radius_field, angle_field] {
                prop_assert!((g(&m, r, edge - h) - g(&m, r, edge + h)).abs() < 1e-4);
            }
        }
    }
}
