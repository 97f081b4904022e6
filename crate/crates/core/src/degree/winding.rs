use core::cell::Cell;

use super::mesh::{ImageSurface, ImageTriangle};
use crate::geometry::CartesianPoint;
use crate::math::{atan2, pairwise_sum_by, round, PI};
use crate::{Error, Result};

/// Acceptance thresholds for [`degree_at`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeOptions {
    /// Every image triangle must be farther from the query point than this
    /// multiple of its own diameter.
    pub guard_factor: f64,
    /// Largest accepted distance of the winding number from an integer.
    pub max_residue: f64,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        DegreeOptions {
            guard_factor: 10.0,
            max_residue: 0.1,
        }
    }
}

/// Raw winding number of a closed image surface around a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub winding: f64,
    pub degree: i64,
    /// `|winding - degree|`.
    pub residue: f64,
    /// `min over triangles of dist(y, T) / diam(T)`; triangles of zero
    /// diameter are ignored.
    pub guard_margin: f64,
}

impl Winding {
    pub fn passes(&self, opts: &DegreeOptions) -> bool {
        self.guard_margin > opts.guard_factor && self.residue < opts.max_residue
    }

    fn check(self, opts: &DegreeOptions) -> Result<Winding> {
        if !(self.guard_margin > opts.guard_factor) {
            return Err(Error::GuardViolation {
                margin: self.guard_margin,
            });
        }
        if !(self.residue < opts.max_residue) {
            return Err(Error::MeshTooCoarse {
                winding: self.winding,
            });
        }
        Ok(self)
    }
}

/// Signed solid angle of the triangle `(a, b, c)` seen from the origin
/// (van Oosterom and Strackee).
pub fn solid_angle(a: CartesianPoint, b: CartesianPoint, c: CartesianPoint) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * atan2(num, den)
}

/// Distance from `p` to the closed triangle `(a, b, c)`.
pub fn point_triangle_distance(p: CartesianPoint, a: CartesianPoint, b: CartesianPoint, c: CartesianPoint) -> f64 {
    let ab = b.sub(a);
    let ac = c.sub(a);
    let ap = p.sub(a);
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return p.dist(a);
    }
    let bp = p.sub(b);
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return p.dist(b);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return p.dist(a.add(ab.scale(v)));
    }
    let cp = p.sub(c);
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return p.dist(c);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return p.dist(a.add(ac.scale(w)));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return p.dist(b.add(c.sub(b).scale(w)));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    p.dist(a.add(ab.scale(v)).add(ac.scale(w)))
}

fn triangle_term(s: &ImageSurface, t: &ImageTriangle, y: CartesianPoint, margin: &Cell<f64>) -> f64 {
    if t.diameter == 0.0 {
        return 0.0;
    }
    let lower = (y.dist(t.centroid) - t.bound_radius) / t.diameter;
    let [a, b, c] = t.vertices.map(|i| s.image_vertices[i as usize]);
    if lower < margin.get() {
        let exact = point_triangle_distance(y, a, b, c) / t.diameter;
        if exact < margin.get() {
            margin.set(exact);
        }
    }
    solid_angle(a.sub(y), b.sub(y), c.sub(y))
}

/// Winding number of the union of closed surfaces `parts` around `y`,
/// without acceptance checks.
pub fn winding_union(parts: &[&ImageSurface], y: CartesianPoint) -> Winding {
    let margin = Cell::new(f64::INFINITY);
    let mut total = 0.0;
    for s in parts {
        total += pairwise_sum_by(s.triangles.len(), &|k| triangle_term(s, &s.triangles[k], y, &margin));
    }
    let winding = total / (4.0 * PI);
    let degree = round(winding);
    Winding {
        winding,
        degree: degree as i64,
        residue: (winding - degree).abs(),
        guard_margin: margin.get(),
    }
}

pub fn winding(surface: &ImageSurface, y: CartesianPoint) -> Winding {
    winding_union(&[surface], y)
}

/// Degree of the surface's parametrization at `y`, as the rounded sum of
/// signed solid angles over `4π`.
pub fn degree_at(surface: &ImageSurface, y: CartesianPoint, opts: &DegreeOptions) -> Result<Winding> {
    winding(surface, y).check(opts)
}

/// [`degree_at`] for a union of closed surfaces, such as the two boundary
/// spheres of a shell with the inner one reversed.
pub fn degree_at_union(parts: &[&ImageSurface], y: CartesianPoint, opts: &DegreeOptions) -> Result<Winding> {
    winding_union(parts, y).check(opts)
}

/// Membership of `y` in the topological image, read as nonzero degree.
pub fn in_topological_image(surface: &ImageSurface, y: CartesianPoint, opts: &DegreeOptions) -> Result<bool> {
    Ok(degree_at(surface, y, opts)?.degree != 0)
}
