use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math::{acos, ceil, cos, sin, sqrt, PI, TAU};
use crate::{Error, Result};

/// Triangulation of a disk in the plane. Nodes `0..n_boundary` lie on the
/// boundary circle in counterclockwise order; triangles are counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[u32; 3]>,
    pub n_boundary: usize,
}

/// Meshes are rejected below this minimum interior angle.
pub const MIN_ANGLE_DEG: f64 = 10.0;

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Strictly positive when `d` lies inside the circumcircle of the
/// counterclockwise triangle `abc`.
fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let al = adx * adx + ady * ady;
    let bl = bdx * bdx + bdy * bdy;
    let cl = cdx * cdx + cdy * cdy;
    adx * (bdy * cl - bl * cdy) - ady * (bdx * cl - bl * cdx) + al * (bdx * cdy - bdy * cdx)
}

/// Delaunay triangulation by Bowyer-Watson insertion inside a large
/// enclosing triangle. Triangles touching the enclosing vertices are dropped,
/// so hull edges are only guaranteed when they are Gabriel edges of the set.
pub fn delaunay(points: &[[f64; 2]]) -> Vec<[u32; 3]> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE) * 50.0;
    let mut pts = points.to_vec();
    pts.push([c[0] - span, c[1] - span]);
    pts.push([c[0] + span, c[1] - span]);
    pts.push([c[0], c[1] + span]);
    let mut tris: Vec<[u32; 3]> = Vec::from([[n as u32, n as u32 + 1, n as u32 + 2]]);
    let mut bad = Vec::new();
    let mut edges: BTreeMap<(u32, u32), Option<(u32, u32)>> = BTreeMap::new();
    for k in 0..n {
        let p = pts[k];
        bad.clear();
        for (i, t) in tris.iter().enumerate() {
            if in_circle(pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize], p) > 0.0 {
                bad.push(i);
            }
        }
        edges.clear();
        for &i in &bad {
            let t = tris[i];
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                match edges.get_mut(&key) {
                    Some(slot) => *slot = None,
                    None => {
                        edges.insert(key, Some((a, b)));
                    }
                }
            }
        }
        for &i in bad.iter().rev() {
            tris.swap_remove(i);
        }
        for &(a, b) in edges.values().flatten() {
            tris.push([a, b, k as u32]);
        }
    }
    tris.retain(|t| t.iter().all(|&v| (v as usize) < n));
    tris
}

fn angle_at(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1]];
    let v = [c[0] - a[0], c[1] - a[1]];
    let d = (u[0] * v[0] + u[1] * v[1]) / sqrt((u[0] * u[0] + u[1] * u[1]) * (v[0] * v[0] + v[1] * v[1]));
    acos(d.clamp(-1.0, 1.0))
}

impl PlanarMesh {
    /// Smallest interior angle in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut m = f64::INFINITY;
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.nodes[i as usize]);
            m = m.min(angle_at(a, b, c)).min(angle_at(b, c, a)).min(angle_at(c, a, b));
        }
        m * 180.0 / PI
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| 0.5 * orient(self.nodes[t[0] as usize], self.nodes[t[1] as usize], self.nodes[t[2] as usize]))
            .sum()
    }

    /// Whether every edge is shared by at most two triangles with opposite
    /// orientations and every boundary chord is present.
    pub fn is_conforming(&self) -> bool {
        let mut seen: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                *seen.entry((t[e], t[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        if seen.values().any(|&c| c > 1) {
            return false;
        }
        let nb = self.n_boundary as u32;
        seen.keys().all(|&(a, b)| {
            seen.contains_key(&(b, a)) || (a < nb && b < nb && (b == (a + 1) % nb))
        }) && (0..nb).all(|a| seen.contains_key(&(a, (a + 1) % nb)))
    }
}

/// Triangulates the disk of radius `radius` about the origin with edges of
/// length about `h`: equally spaced boundary nodes, a hexagonal interior
/// lattice kept at least `0.6 h` from the circle, and a Delaunay
/// triangulation of both.
pub fn triangulate_disk(radius: f64, h: f64) -> Result<PlanarMesh> {
    if !(radius > 0.0 && radius.is_finite()) || !(h > 0.0 && h < radius) {
        return Err(Error::InvalidParameter(alloc::format!(
            "disk radius {radius} and mesh size {h} must satisfy 0 < h < radius"
        )));
    }
    let nb = (ceil(TAU * radius / h) as usize).max(8);
    let mut nodes: Vec<[f64; 2]> = (0..nb)
        .map(|k| {
            let t = TAU * k as f64 / nb as f64;
            [radius * cos(t), radius * sin(t)]
        })
        .collect();
    let inner = radius - 0.6 * h;
    let dy = h * sqrt(3.0) / 2.0;
    let rows = ceil(inner / dy) as i64;
    for j in -rows..=rows {
        let y = j as f64 * dy;
        let shift = if j.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        let cols = ceil(inner / h) as i64 + 1;
        for i in -cols..=cols {
            let x = i as f64 * h + shift;
            if x * x + y * y <= inner * inner {
                nodes.push([x, y]);
            }
        }
    }
    let n = nodes.len();
    let m = n - nb;
    let ghost = radius + h;
    // Interior first: the boundary ring is cocircular, so inserting it into
    // an empty triangulation leaves every in-circle test to rounding.
    let mut all: Vec<[f64; 2]> = nodes[nb..].iter().chain(&nodes[..nb]).copied().collect();
    for k in 0..nb {
        let t = TAU * (k as f64 + 0.5) / nb as f64;
        all.push([ghost * cos(t), ghost * sin(t)]);
    }
    let unshuffle = |v: u32| {
        let v = v as usize;
        if v < m {
            (v + nb) as u32
        } else {
            (v - m) as u32
        }
    };
    let triangles: Vec<[u32; 3]> = delaunay(&all)
        .into_iter()
        .filter(|t| t.iter().all(|&v| (v as usize) < n))
        .map(|t| t.map(unshuffle))
        .collect();
    let mesh = PlanarMesh {
        nodes,
        triangles,
        n_boundary: nb,
    };
    let polygon = 0.5 * nb as f64 * radius * radius * sin(TAU / nb as f64);
    if !mesh.is_conforming() || (mesh.area() - polygon).abs() > 1e-9 * polygon {
        return Err(Error::DegenerateMesh { min_angle_deg: 0.0 });
    }
    let min_angle_deg = mesh.min_angle_deg();
    if !(min_angle_deg >= MIN_ANGLE_DEG) {
        return Err(Error::DegenerateMesh { min_angle_deg });
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_with_center() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let t = delaunay(&pts);
        assert_eq!(t.len(), 4);
        for tri in &t {
            assert!(orient(pts[tri[0] as usize], pts[tri[1] as usize], pts[tri[2] as usize]) > 0.0);
            assert!(tri.contains(&4));
        }
    }

    #[test]
    fn disk_meshes_are_valid() {
        for (r, h) in [(1.0, 0.2), (1.0, 0.05), (1.0, 0.02), (0.03, 0.002), (2.5, 0.3)] {
            let m = triangulate_disk(r, h).unwrap();
            assert!(m.is_conforming());
            assert!(m.min_angle_deg() >= MIN_ANGLE_DEG, "{r} {h}: {}", m.min_angle_deg());
            for t in &m.triangles {
                let [a, b, c] = t.map(|i| m.nodes[i as usize]);
                assert!(orient(a, b, c) > 0.0);
            }
            for p in &m.nodes[..m.n_boundary] {
                assert!((sqrt(p[0] * p[0] + p[1] * p[1]) - r).abs() < 1e-12 * r);
            }
        }
    }

    #[test]
    fn bad_sizes_are_rejected() {
        assert!(triangulate_disk(1.0, 0.0).is_err());
        assert!(triangulate_disk(1.0, 1.5).is_err());
        assert!(triangulate_disk(-1.0, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn triangles_have_empty_circumcircles(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 4..40)) {
            let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            for t in delaunay(&pts) {
                let [a, b, c] = t.map(|i| pts[i as usize]);
                prop_assert!(orient(a, b, c) > 0.0);
                let scale = orient(a, b, c).abs().max(1e-300);
                for (k, d) in pts.iter().enumerate() {
                    if !t.contains(&(k as u32)) {
                        prop_assert!(in_circle(a, b, c, *d) <= 1e-9 * scale);
                    }
                }
            }
        }
    }
}
