//! Points in Cartesian and spherical coordinates.
//!
//! The polar angle `alpha` is measured from the positive z-axis, so
//! `z = r cos(alpha)`.

use crate::math::{acos, atan2, cos, sin, sqrt, PI};

/// A point in spherical coordinates in canonical form.
///
/// Undetermined angles are set to zero: both angles at the origin, and the
/// azimuth on the polar axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// A point in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SphericalPoint {
    /// Builds a canonical point, wrapping the azimuth into `(-π, π]`.
    pub fn new(r: f64, alpha: f64, beta: f64) -> Self {
        let mut p = SphericalPoint {
            r,
            alpha,
            beta: wrap_azimuth(beta),
        };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        if self.r == 0.0 {
            self.alpha = 0.0;
            self.beta = 0.0;
        } else if self.alpha == 0.0 || self.alpha == PI {
            self.beta = 0.0;
        }
    }
}

fn wrap_azimuth(beta: f64) -> f64 {
    if beta > -PI && beta <= PI {
        return beta;
    }
    let b = beta - crate::math::TAU * crate::math::floor((beta + PI) / crate::math::TAU);
    if b <= -PI {
        b + crate::math::TAU
    } else {
        b
    }
}

impl CartesianPoint {
    pub const ORIGIN: CartesianPoint = CartesianPoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        CartesianPoint { x, y, z }
    }

    pub fn add(self, o: Self) -> Self {
        CartesianPoint::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Self) -> Self {
        CartesianPoint::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(self, s: f64) -> Self {
        CartesianPoint::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        CartesianPoint::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn dist(self, o: Self) -> f64 {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn to_cartesian(p: SphericalPoint) -> CartesianPoint {
    let (sa, ca) = (sin(p.alpha), cos(p.alpha));
    CartesianPoint::new(p.r * sa * cos(p.beta), p.r * sa * sin(p.beta), p.r * ca)
}

pub fn to_spherical(c: CartesianPoint) -> SphericalPoint {
    let rho = sqrt(c.x * c.x + c.y * c.y);
    let r = sqrt(rho * rho + c.z * c.z);
    if r == 0.0 {
        return SphericalPoint::new(0.0, 0.0, 0.0);
    }
    let alpha = if rho == 0.0 {
        if c.z > 0.0 {
            0.0
        } else {
            PI
        }
    } else {
        atan2(rho, c.z)
    };
    let beta = if rho == 0.0 { 0.0 } else { atan2(c.y, c.x) };
    SphericalPoint::new(r, alpha, beta)
}

/// Reflection through the xy-plane; in spherical terms `alpha -> π - alpha`.
pub fn reflect_z(c: CartesianPoint) -> CartesianPoint {
    CartesianPoint::new(c.x, c.y, -c.z)
}

/// Angle between two nonzero vectors.
pub fn angle_between(u: CartesianPoint, v: CartesianPoint) -> f64 {
    let c = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
    acos(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    use proptest::prelude::*;

    fn close(a: CartesianPoint, b: CartesianPoint) {
        assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-15);
        assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-15);
        assert_abs_diff_eq!(a.z, b.z, epsilon = 1e-15);
    }

    #[test]
    fn cartesian_examples() {
        close(
            to_cartesian(SphericalPoint::new(1.0, 0.0, 0.0)),
            CartesianPoint::new(0.0, 0.0, 1.0),
        );
        close(
            to_cartesian(SphericalPoint::new(2.0, FRAC_PI_2, 0.0)),
            CartesianPoint::new(2.0, 0.0, 0.0),
        );
        close(
            to_cartesian(SphericalPoint::new(0.5, PI, 0.0)),
            CartesianPoint::new(0.0, 0.0, -0.5),
        );
    }

    #[test]
    fn spherical_examples() {
        assert_eq!(
            to_spherical(CartesianPoint::new(0.0, 0.0, 1.0)),
            SphericalPoint::new(1.0, 0.0, 0.0)
        );
        let o = to_spherical(CartesianPoint::ORIGIN);
        assert_eq!((o.r, o.alpha, o.beta), (0.0, 0.0, 0.0));
        let p = to_spherical(CartesianPoint::new(1.0, 1.0, 0.0));
        assert_abs_diff_eq!(p.r, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.beta, FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn canonical_forms() {
        let p = SphericalPoint::new(0.0, 1.0, 2.0);
        assert_eq!((p.alpha, p.beta), (0.0, 0.0));
        let q = SphericalPoint::new(3.0, PI, 1.0);
        assert_eq!(q.beta, 0.0);
        let s = to_spherical(CartesianPoint::new(0.0, 0.0, -2.0));
        assert_eq!((s.alpha, s.beta), (PI, 0.0));
        assert_abs_diff_eq!(SphericalPoint::new(1.0, 1.0, 3.0 * PI).beta, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(SphericalPoint::new(1.0, 1.0, -PI).beta, PI, epsilon = 1e-12);
    }

    #[test]
    fn reflection_examples() {
        assert_eq!(
            reflect_z(CartesianPoint::new(1.0, 2.0, 3.0)),
            CartesianPoint::new(1.0, 2.0, -3.0)
        );
        assert_eq!(reflect_z(CartesianPoint::ORIGIN), CartesianPoint::ORIGIN);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn spherical_round_trip(r in 1e-6f64..10.0, alpha in 1e-9f64..(PI - 1e-9), beta in (-PI + 1e-9)..PI) {
            let p = SphericalPoint::new(r, alpha, beta);
            let q = to_spherical(to_cartesian(p));
            prop_assert!((q.r - p.r).abs() <= 1e-12 * r);
            prop_assert!((q.alpha - p.alpha).abs() <= 1e-12);
            prop_assert!((q.beta - p.beta).abs() <= 1e-12 * (1.0 + 1.0 / (r * alpha.sin())).min(1e6));
        }

        #[test]
        fn cartesian_round_trip(x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let c = CartesianPoint::new(x, y, z);
            let d = to_cartesian(to_spherical(c));
            prop_assert!(c.dist(d) <= 1e-12 * (1.0 + c.norm()));
        }

        #[test]
        fn reflection_is_isometric_involution(a in prop::array::uniform3(-5.0f64..5.0), b in prop::array::uniform3(-5.0f64..5.0)) {
            let p = CartesianPoint::new(a[0], a[1], a[2]);
            let q = CartesianPoint::new(b[0], b[1], b[2]);
            prop_assert_eq!(reflect_z(p).dist(reflect_z(q)), p.dist(q));
            prop_assert_eq!(reflect_z(reflect_z(p)), p);
        }
    }
}
