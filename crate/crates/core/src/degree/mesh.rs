use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::exec::Executor;
use crate::geometry::CartesianPoint;
use crate::map::PointMap;
use crate::math::sqrt;
use crate::{Error, Result};

pub const MAX_LEVEL: u32 = 8;

/// Icosphere triangulation of a sphere with outward-oriented triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangulatedSphere {
    pub center: CartesianPoint,
    pub radius: f64,
    pub vertices: Vec<CartesianPoint>,
    pub triangles: Vec<[u32; 3]>,
    pub level: u32,
}

fn icosahedron() -> (Vec<CartesianPoint>, Vec<[u32; 3]>) {
    let t = 0.5 * (1.0 + sqrt(5.0));
    let raw = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ];
    let v = raw
        .iter()
        .map(|&(x, y, z)| unit(CartesianPoint::new(x, y, z)))
        .collect();
    let f = alloc::vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (v, f)
}

fn unit(c: CartesianPoint) -> CartesianPoint {
    c.scale(1.0 / c.norm())
}

/// Triangulates the sphere `|x - center| = radius` by `level` rounds of
/// midpoint subdivision of an icosahedron, giving `20 · 4^level` triangles.
pub fn icosphere(center: CartesianPoint, radius: f64, level: u32) -> Result<TriangulatedSphere> {
    if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "sphere needs a finite center and positive radius, got {radius}"
        )));
    }
    if level > MAX_LEVEL {
        return Err(Error::InvalidParameter(alloc::format!(
            "icosphere level {level} exceeds {MAX_LEVEL}"
        )));
    }
    let (mut dirs, mut tris) = icosahedron();
    for _ in 0..level {
        let mut cache: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let mut mid = |i: u32, j: u32| -> u32 {
                let key = (i.min(j), i.max(j));
                *cache.entry(key).or_insert_with(|| {
                    let m = dirs[i as usize].add(dirs[j as usize]);
                    dirs.push(unit(m));
                    (dirs.len() - 1) as u32
                })
            };
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let vertices = dirs.iter().map(|d| center.add(d.scale(radius))).collect();
    Ok(TriangulatedSphere {
        center,
        radius,
        vertices,
        triangles: tris,
        level,
    })
}

impl TriangulatedSphere {
    /// Sum of the outward area vectors of all triangles.
    pub fn total_area_vector(&self) -> CartesianPoint {
        let mut s = CartesianPoint::ORIGIN;
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.vertices[i as usize]);
            s = s.add(area_vector(a, b, c));
        }
        s
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (i, j) = (t[k], t[(k + 1) % 3]);
                edges.insert((i.min(j), i.max(j)), ());
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// True when every directed edge occurs once and its reverse once.
    pub fn is_oriented_manifold(&self) -> bool {
        let mut directed: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        directed
            .iter()
            .all(|(&(i, j), &n)| n == 1 && directed.get(&(j, i)) == Some(&1))
    }

    /// Centroid of the flat triangle `k`.
    pub fn centroid(&self, k: usize) -> CartesianPoint {
        let [a, b, c] = self.triangles[k].map(|i| self.vertices[i as usize]);
        a.add(b).add(c).scale(1.0 / 3.0)
    }
}

/// `((b - a) x (c - a)) / 2`.
pub fn area_vector(a: CartesianPoint, b: CartesianPoint, c: CartesianPoint) -> CartesianPoint {
    b.sub(a).cross(c.sub(a)).scale(0.5)
}

/// Per-triangle data of an image surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageTriangle {
    pub vertices: [u32; 3],
    pub area_vector: CartesianPoint,
    /// Longest edge.
    pub diameter: f64,
    pub centroid: CartesianPoint,
    /// Largest distance from the centroid to a vertex.
    pub bound_radius: f64,
}

impl ImageTriangle {
    fn new(vertices: [u32; 3], pts: &[CartesianPoint]) -> Self {
        let [a, b, c] = vertices.map(|i| pts[i as usize]);
        let centroid = a.add(b).add(c).scale(1.0 / 3.0);
        ImageTriangle {
            vertices,
            area_vector: area_vector(a, b, c),
            diameter: a.dist(b).max(b.dist(c)).max(c.dist(a)),
            centroid,
            bound_radius: centroid.dist(a).max(centroid.dist(b)).max(centroid.dist(c)),
        }
    }
}

/// A triangulated sphere pushed forward by a map, with orientation inherited
/// from the source.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSurface {
    pub source: TriangulatedSphere,
    pub image_vertices: Vec<CartesianPoint>,
    pub triangles: Vec<ImageTriangle>,
}

impl ImageSurface {
    /// Builds the surface from already mapped vertex positions.
    pub fn from_vertices(source: TriangulatedSphere, image_vertices: Vec<CartesianPoint>) -> Result<Self> {
        if image_vertices.len() != source.vertices.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} image vertices for {} source vertices",
                image_vertices.len(),
                source.vertices.len()
            )));
        }
        if let Some(bad) = image_vertices.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("non-finite image vertex {bad:?}")));
        }
        let triangles = source
            .triangles
            .iter()
            .map(|&t| ImageTriangle::new(t, &image_vertices))
            .collect();
        Ok(ImageSurface {
            source,
            image_vertices,
            triangles,
        })
    }

    /// The same surface with every triangle's orientation flipped.
    pub fn reversed(&self) -> Self {
        let mut source = self.source.clone();
        for t in source.triangles.iter_mut() {
            t.swap(1, 2);
        }
        let triangles = source
            .triangles
            .iter()
            .map(|&t| ImageTriangle::new(t, &self.image_vertices))
            .collect();
        ImageSurface {
            source,
            image_vertices: self.image_vertices.clone(),
            triangles,
        }
    }

    pub fn max_diameter(&self) -> f64 {
        self.triangles.iter().fold(0.0, |m, t| m.max(t.diameter))
    }

    /// Axis-aligned bounding box of the image vertices.
    pub fn bounding_box(&self) -> (CartesianPoint, CartesianPoint) {
        let mut lo = CartesianPoint::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = lo.scale(-1.0);
        for v in &self.image_vertices {
            lo = CartesianPoint::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = CartesianPoint::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (lo, hi)
    }

    /// ASCII OFF listing of the image mesh. `comments` are emitted as `#`
    /// lines after the header.
    pub fn to_off(&self, comments: &[&str]) -> String {
        let mut s = String::new();
        s.push_str("OFF\n");
        for c in comments {
            for line in c.lines() {
                let _ = writeln!(s, "# {line}");
            }
        }
        let _ = writeln!(s, "{} {} 0", self.image_vertices.len(), self.triangles.len());
        for v in &self.image_vertices {
            let _ = writeln!(s, "{:e} {:e} {:e}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let [a, b, c] = t.vertices;
            let _ = writeln!(s, "3 {a} {b} {c}");
        }
        s
    }
}

/// Maps every vertex of `mesh` through `map`.
pub fn push_mesh<M, E>(map: &M, mesh: &TriangulatedSphere, exec: &E) -> Result<ImageSurface>
where
    M: PointMap + ?Sized,
    E: Executor,
{
    let mapped = exec.map_indexed(mesh.vertices.len(), &|i| map.map_point(mesh.vertices[i]));
    let verts = mapped.into_iter().collect::<Result<Vec<_>>>()?;
    ImageSurface::from_vertices(mesh.clone(), verts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Serial;
    use crate::map::{Identity, ReflectZ};
    use crate::mapfamily::LimitMap;
    use proptest::prelude::*;

    #[test]
    fn counts_follow_subdivision() {
        let s0 = icosphere(CartesianPoint::ORIGIN, 1.0, 0).unwrap();
        assert_eq!((s0.vertices.len(), s0.triangles.len()), (12, 20));
        let s3 = icosphere(CartesianPoint::ORIGIN, 1.0, 3).unwrap();
        assert_eq!(s3.triangles.len(), 1280);
        assert_eq!(s3.vertices.len(), 642);
        assert!(icosphere(CartesianPoint::ORIGIN, 1.0, 9).is_err());
        assert!(icosphere(CartesianPoint::ORIGIN, 0.0, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn icosphere_invariants(level in 0u32..5, radius in 0.01f64..20.0,
                                cx in -3.0f64..3.0, cz in -3.0f64..3.0) {
            let c = CartesianPoint::new(cx, 0.5, cz);
            let s = icosphere(c, radius, level).unwrap();
            for v in &s.vertices {
                prop_assert!((v.dist(c) - radius).abs() <= 1e-12 * radius);
            }
            prop_assert_eq!(s.euler_characteristic(), 2);
            prop_assert!(s.is_oriented_manifold());
            prop_assert!(s.total_area_vector().norm() <= 1e-10 * radius * radius);
            for k in 0..s.triangles.len() {
                let [a, b, cc] = s.triangles[k].map(|i| s.vertices[i as usize]);
                prop_assert!(area_vector(a, b, cc).dot(s.centroid(k).sub(c)) > 0.0);
            }
        }
    }

    #[test]
    fn identity_and_reflection_push_forward() {
        let s = icosphere(CartesianPoint::ORIGIN, 1.0, 2).unwrap();
        let id = push_mesh(&Identity { radius: 2.0 }, &s, &Serial).unwrap();
        for (v, w) in s.vertices.iter().zip(&id.image_vertices) {
            assert!(w.dist(*v) < 1e-15);
        }
        let rz = push_mesh(&ReflectZ { radius: 2.0 }, &s, &Serial).unwrap();
        for (v, w) in s.vertices.iter().zip(&rz.image_vertices) {
            assert!(w.dist(CartesianPoint::new(v.x, v.y, -v.z)) < 1e-15);
        }
    }

    #[test]
    fn limit_image_of_half_sphere_stays_in_ball() {
        let s = icosphere(CartesianPoint::ORIGIN, 0.5, 4).unwrap();
        let img = push_mesh(&LimitMap::new(7.0 / 12.0), &s, &Serial).unwrap();
        assert!(img.image_vertices.iter().all(|v| v.norm() <= 0.5 + 1e-12));
    }

    #[test]
    fn off_listing_has_header_and_counts() {
        let s = icosphere(CartesianPoint::ORIGIN, 1.0, 0).unwrap();
        let img = ImageSurface::from_vertices(s.clone(), s.vertices.clone()).unwrap();
        let off = img.to_off(&["level 0"]);
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("# level 0"));
        assert_eq!(lines.next(), Some("12 20 0"));
        assert_eq!(off.lines().count(), 3 + 12 + 20);
        let rev = img.reversed();
        assert_eq!(rev.source.triangles[0], [0, 5, 11]);
        assert!(rev.source.is_oriented_manifold());
    }
}
