use alloc::vec;
use alloc::vec::Vec;

use super::mesh::ImageSurface;
use super::winding::winding;
use crate::exec::Executor;
use crate::geometry::CartesianPoint;
use crate::map::PointMap;
use crate::math::{ceil, floor, pairwise_sum, sqrt};
use crate::sampling::Halton;
use crate::{Error, Result};

/// Test vector fields with closed-form divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorField {
    /// `u(y) = y / 3`, with `div u = 1`.
    Radial,
    /// `u(y) = (1 - |y - c|² / ρ²)³ e` inside `B(c, ρ)`, zero outside.
    Bump {
        center: CartesianPoint,
        radius: f64,
        direction: CartesianPoint,
    },
}

impl VectorField {
    pub fn value(&self, y: CartesianPoint) -> CartesianPoint {
        match *self {
            VectorField::Radial => y.scale(1.0 / 3.0),
            VectorField::Bump {
                center,
                radius,
                direction,
            } => {
                let q = 1.0 - y.sub(center).dot(y.sub(center)) / (radius * radius);
                if q <= 0.0 {
                    CartesianPoint::ORIGIN
                } else {
                    direction.scale(q * q * q)
                }
            }
        }
    }

    pub fn divergence(&self, y: CartesianPoint) -> f64 {
        match *self {
            VectorField::Radial => 1.0,
            VectorField::Bump {
                center,
                radius,
                direction,
            } => {
                let d = y.sub(center);
                let q = 1.0 - d.dot(d) / (radius * radius);
                if q <= 0.0 {
                    0.0
                } else {
                    -6.0 * q * q * d.dot(direction) / (radius * radius)
                }
            }
        }
    }

    /// `∫ div u` along the vertical segment `{(x, y)} x [z0, z1]`.
    fn column_integral(&self, x: f64, y: f64, z0: f64, z1: f64) -> f64 {
        match *self {
            VectorField::Radial => z1 - z0,
            VectorField::Bump { center, radius, .. } => {
                let h2 = radius * radius - (x - center.x) * (x - center.x) - (y - center.y) * (y - center.y);
                if h2 <= 0.0 {
                    return 0.0;
                }
                let h = sqrt(h2);
                let (a, b) = (z0.max(center.z - h), z1.min(center.z + h));
                if a >= b {
                    return 0.0;
                }
                // the integrand is a quintic in z on the support
                const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
                const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
                let (c, hw) = (0.5 * (a + b), 0.5 * (b - a));
                let mut s = 0.0;
                for k in 0..3 {
                    s += WEIGHTS[k] * self.divergence(CartesianPoint::new(x, y, c + hw * NODES[k]));
                }
                hw * s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakIdentityOptions {
    /// Number of vertical integration columns along each horizontal axis.
    pub columns: usize,
    /// Points at which the crossing degree is compared with the solid-angle
    /// degree.
    pub check_points: usize,
    pub seed: u64,
    /// Largest accepted fraction of grid nodes on ambiguous columns.
    pub max_failed_fraction: f64,
}

impl Default for WeakIdentityOptions {
    fn default() -> Self {
        WeakIdentityOptions {
            columns: 256,
            check_points: 64,
            seed: 0,
            max_failed_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakIdentity {
    /// `∫ deg(y) div u(y) dy`.
    pub lhs: f64,
    /// `Σ_T u(f(c_T)) · A_T` over image triangles.
    pub rhs: f64,
    /// `|lhs - rhs| / max(|lhs|, 1)`.
    pub residual: f64,
    pub failed_nodes: usize,
    pub total_nodes: usize,
    pub checked_points: usize,
}

/// Relative size below which a barycentric weight makes a crossing ambiguous.
const AMBIGUOUS: f64 = 1e-12;

enum Hit {
    Miss,
    Cross(f64, i64),
    Ambiguous,
}

fn vertical_hit(a: CartesianPoint, b: CartesianPoint, c: CartesianPoint, x: f64, y: f64) -> Hit {
    let orient = |p: CartesianPoint, q: CartesianPoint| (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
    let w0 = orient(b, c);
    let w1 = orient(c, a);
    let w2 = orient(a, b);
    let area = w0 + w1 + w2;
    if area == 0.0 {
        return Hit::Miss;
    }
    let (u0, u1, u2) = (w0 / area, w1 / area, w2 / area);
    if u0 < -AMBIGUOUS || u1 < -AMBIGUOUS || u2 < -AMBIGUOUS {
        return Hit::Miss;
    }
    if u0 <= AMBIGUOUS || u1 <= AMBIGUOUS || u2 <= AMBIGUOUS {
        return Hit::Ambiguous;
    }
    let z = u0 * a.z + u1 * b.z + u2 * c.z;
    Hit::Cross(z, if area > 0.0 { 1 } else { -1 })
}

/// Degree of `surface` at `p` by counting signed crossings of the upward
/// vertical ray from `p`. `None` when the ray grazes an edge or vertex.
pub fn crossing_degree(surface: &ImageSurface, p: CartesianPoint) -> Option<i64> {
    let mut deg = 0;
    for t in &surface.triangles {
        let [a, b, c] = t.vertices.map(|i| surface.image_vertices[i as usize]);
        match vertical_hit(a, b, c, p.x, p.y) {
            Hit::Miss => {}
            Hit::Ambiguous => return None,
            Hit::Cross(z, s) => {
                if z > p.z {
                    deg += s;
                }
            }
        }
    }
    Some(deg)
}

/// Evaluates both sides of `∫ deg(f, B, y) div u(y) dy = ∫_{∂B} (u∘f) · (Λ₂ D_τ f) ν`
/// for the sphere behind `surface`.
///
/// The left side integrates the degree of the image polyhedron column by
/// column, each column split exactly at its crossings with the surface. The
/// column degrees are cross-checked against [`winding`] at seeded points.
/// The right side evaluates `u` at the image of each source-triangle
/// centroid against the image triangle's area vector.
pub fn verify_weak_identity<M, E>(
    map: &M,
    surface: &ImageSurface,
    field: &VectorField,
    opts: &WeakIdentityOptions,
    exec: &E,
) -> Result<WeakIdentity>
where
    M: PointMap + ?Sized,
    E: Executor,
{
    let n = opts.columns;
    if n < 2 {
        return Err(Error::InvalidParameter(alloc::format!("need at least 2 columns, got {n}")));
    }
    let (lo, hi) = surface.bounding_box();
    let pad = 0.031_4 * (hi.sub(lo).norm() + 1e-300);
    let (x0, y0) = (lo.x - pad, lo.y - pad);
    let (hx, hy) = ((hi.x - lo.x + 2.0 * pad) / n as f64, (hi.y - lo.y + 2.0 * pad) / n as f64);
    let (zlo, zhi) = (lo.z - pad, hi.z + pad);

    let mut crossings: Vec<Vec<(f64, i64)>> = vec![Vec::new(); n * n];
    let mut ambiguous = vec![false; n * n];
    let col_range = |v0: f64, h: f64, a: f64, b: f64| {
        let i0 = ceil((a - v0) / h - 0.5).max(0.0) as usize;
        let i1 = (floor((b - v0) / h - 0.5) as isize).min(n as isize - 1);
        (i0, i1)
    };
    for t in &surface.triangles {
        let [a, b, c] = t.vertices.map(|i| surface.image_vertices[i as usize]);
        let (i0, i1) = col_range(x0, hx, a.x.min(b.x).min(c.x), a.x.max(b.x).max(c.x));
        let (j0, j1) = col_range(y0, hy, a.y.min(b.y).min(c.y), a.y.max(b.y).max(c.y));
        if i1 < 0 || j1 < 0 {
            continue;
        }
        for i in i0..=i1 as usize {
            let x = x0 + (i as f64 + 0.5) * hx;
            for j in j0..=j1 as usize {
                let y = y0 + (j as f64 + 0.5) * hy;
                match vertical_hit(a, b, c, x, y) {
                    Hit::Miss => {}
                    Hit::Ambiguous => ambiguous[i * n + j] = true,
                    Hit::Cross(z, s) => crossings[i * n + j].push((z, s)),
                }
            }
        }
    }

    let columns = exec.map_indexed(n * n, &|k| {
        if ambiguous[k] {
            return 0.0;
        }
        let (x, y) = (x0 + ((k / n) as f64 + 0.5) * hx, y0 + ((k % n) as f64 + 0.5) * hy);
        let mut cs = crossings[k].clone();
        cs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut deg = 0;
        let mut top = zhi;
        let mut acc = 0.0;
        for &(z, s) in cs.iter().rev() {
            if deg != 0 {
                acc += deg as f64 * field.column_integral(x, y, z, top);
            }
            deg += s;
            top = z;
        }
        if deg != 0 {
            acc += deg as f64 * field.column_integral(x, y, zlo, top);
        }
        acc
    });
    let failed_columns = ambiguous.iter().filter(|&&b| b).count();
    let failed_nodes = failed_columns * n;
    let total_nodes = n * n * n;
    if failed_nodes as f64 > opts.max_failed_fraction * total_nodes as f64 {
        return Err(Error::TooManyGuardFailures {
            failed: failed_nodes,
            total: total_nodes,
        });
    }
    let lhs = hx * hy * pairwise_sum(&columns);

    let checks = exec.map_indexed(opts.check_points, &|k| {
        let q = Halton::<3>::new(opts.seed).point(k as u64 + 1);
        let p = CartesianPoint::new(
            x0 + q[0] * n as f64 * hx,
            y0 + q[1] * n as f64 * hy,
            zlo + q[2] * (zhi - zlo),
        );
        let w = winding(surface, p);
        match crossing_degree(surface, p) {
            Some(c) if w.guard_margin > 1e-6 && w.residue < 0.1 => Some((c, w.degree)),
            _ => None,
        }
    });
    let mut checked_points = 0;
    for (crossing, solid) in checks.into_iter().flatten() {
        if crossing != solid {
            return Err(Error::DegreeMismatch { crossing, solid });
        }
        checked_points += 1;
    }

    let src = &surface.source;
    let terms = exec.map_indexed(surface.triangles.len(), &|k| -> Result<f64> {
        let y = map.map_point(src.centroid(k))?;
        Ok(field.value(y).dot(surface.triangles[k].area_vector))
    });
    let terms = terms.into_iter().collect::<Result<Vec<_>>>()?;
    let rhs = pairwise_sum(&terms);

    Ok(WeakIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / lhs.abs().max(1.0),
        failed_nodes,
        total_nodes,
        checked_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::mesh::{icosphere, push_mesh};
    use crate::exec::Serial;
    use crate::map::{FnMap, Identity, ReflectZ};
    use crate::math::PI;

    fn sphere_image<M: PointMap>(m: &M, level: u32) -> ImageSurface {
        push_mesh(m, &icosphere(CartesianPoint::ORIGIN, 1.0, level).unwrap(), &Serial).unwrap()
    }

    #[test]
    fn identity_both_sides_are_ball_volume() {
        let id = Identity { radius: 2.0 };
        let img = sphere_image(&id, 5);
        let w = verify_weak_identity(&id, &img, &VectorField::Radial, &WeakIdentityOptions::default(), &Serial)
            .unwrap();
        assert!(w.residual < 1e-3, "{w:?}");
        assert!((w.lhs - 4.0 * PI / 3.0).abs() < 1e-3 * 4.0 * PI / 3.0, "{w:?}");
        assert!((w.rhs - 4.0 * PI / 3.0).abs() < 1e-3 * 4.0 * PI / 3.0);
        assert!(w.checked_points > 32);
    }

    #[test]
    fn reflection_flips_both_sides() {
        let rz = ReflectZ { radius: 2.0 };
        let img = sphere_image(&rz, 5);
        let w = verify_weak_identity(&rz, &img, &VectorField::Radial, &WeakIdentityOptions::default(), &Serial)
            .unwrap();
        assert!(w.residual < 1e-3);
        assert!((w.lhs + 4.0 * PI / 3.0).abs() < 1e-3 * 4.0 * PI / 3.0);
        assert!((w.rhs + 4.0 * PI / 3.0).abs() < 1e-3 * 4.0 * PI / 3.0);
    }

    #[test]
    fn bump_field_balances_on_a_sheared_ball() {
        let m = FnMap(|c: CartesianPoint| Ok(CartesianPoint::new(c.x + 0.3 * c.z, 1.5 * c.y, c.z)));
        let img = sphere_image(&m, 5);
        let field = VectorField::Bump {
            center: CartesianPoint::new(0.2, -0.3, 0.8),
            radius: 0.7,
            direction: CartesianPoint::new(0.3, 0.5, 1.0),
        };
        let w = verify_weak_identity(&m, &img, &field, &WeakIdentityOptions::default(), &Serial).unwrap();
        assert!(w.lhs.abs() > 1e-2);
        assert!(w.residual < 1e-3, "{w:?}");
    }

    #[test]
    fn bump_divergence_matches_difference_quotient() {
        let field = VectorField::Bump {
            center: CartesianPoint::new(0.1, 0.0, -0.2),
            radius: 0.9,
            direction: CartesianPoint::new(-0.4, 1.0, 0.7),
        };
        let y = CartesianPoint::new(0.3, 0.2, 0.1);
        let h = 1e-6;
        let mut div = 0.0;
        for (k, e) in [
            CartesianPoint::new(1.0, 0.0, 0.0),
            CartesianPoint::new(0.0, 1.0, 0.0),
            CartesianPoint::new(0.0, 0.0, 1.0),
        ]
        .into_iter()
        .enumerate()
        {
            let d = field.value(y.add(e.scale(h))).sub(field.value(y.sub(e.scale(h)))).scale(0.5 / h);
            div += d.to_array()[k];
        }
        assert!((div - field.divergence(y)).abs() < 1e-8);
    }
}
