use alloc::vec;
use alloc::vec::Vec;

use super::mesh::ImageSurface;
use super::winding::{point_triangle_distance, solid_angle, DegreeOptions, Winding};
use crate::geometry::CartesianPoint;
use crate::math::{round, sqrt, PI};
use crate::Result;

/// Far-field expansions are used for nodes farther than this multiple of
/// their radius.
const OPENING: f64 = 3.0;
const LEAF: usize = 12;

#[derive(Debug, Clone)]
struct Node {
    lo: [f64; 3],
    hi: [f64; 3],
    center: [f64; 3],
    radius: f64,
    area: [f64; 3],
    /// `Σ a_i e_j` over triangles with centroid offsets `e`.
    m: [[f64; 3]; 3],
    /// `Σ a_i (e_j e_k + S_jk)` with `S` the triangle's own second moment.
    n: [[[f64; 3]; 3]; 3],
    max_diam: f64,
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

/// Bounding-volume hierarchy over an image surface for fast winding numbers
/// at many points: solid angles of nearby triangles are summed exactly, and
/// distant clusters are replaced by their second-order multipole expansion.
#[derive(Debug, Clone)]
pub struct WindingTree<'a> {
    surface: &'a ImageSurface,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

fn arr(p: CartesianPoint) -> [f64; 3] {
    p.to_array()
}

impl<'a> WindingTree<'a> {
    pub fn new(surface: &'a ImageSurface) -> Self {
        let mut order: Vec<u32> = (0..surface.triangles.len() as u32).collect();
        let mut nodes = Vec::new();
        if !order.is_empty() {
            let n = order.len();
            build(surface, &mut order, 0, n, &mut nodes);
        }
        WindingTree { surface, order, nodes }
    }

    fn vertices(&self, t: u32) -> [CartesianPoint; 3] {
        self.surface.triangles[t as usize]
            .vertices
            .map(|i| self.surface.image_vertices[i as usize])
    }

    /// Winding number of the surface around `y`, agreeing with
    /// [`super::winding`] up to the far-field truncation error.
    pub fn winding(&self, y: CartesianPoint) -> Winding {
        let total = self.solid_angle_sum(y);
        let winding = total / (4.0 * PI);
        let degree = round(winding);
        Winding {
            winding,
            degree: degree as i64,
            residue: (winding - degree).abs(),
            guard_margin: self.guard_margin(y),
        }
    }

    pub fn degree_at(&self, y: CartesianPoint, opts: &DegreeOptions) -> Result<Winding> {
        let w = self.winding(y);
        if !(w.guard_margin > opts.guard_factor) {
            return Err(crate::Error::GuardViolation { margin: w.guard_margin });
        }
        if !(w.residue < opts.max_residue) {
            return Err(crate::Error::MeshTooCoarse { winding: w.winding });
        }
        Ok(w)
    }

    fn solid_angle_sum(&self, y: CartesianPoint) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        let q = arr(y);
        let mut total = 0.0;
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            let nd = &self.nodes[k];
            let d = [nd.center[0] - q[0], nd.center[1] - q[1], nd.center[2] - q[2]];
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            if r2 > OPENING * OPENING * nd.radius * nd.radius {
                total += far_field(nd, d, r2);
            } else if let Some((a, b)) = nd.children {
                stack.push(b);
                stack.push(a);
            } else {
                for &t in &self.order[nd.start..nd.end] {
                    let [a, b, c] = self.vertices(t);
                    total += solid_angle(a.sub(y), b.sub(y), c.sub(y));
                }
            }
        }
        total
    }

    /// `min over triangles of dist(y, T) / diam(T)` by branch and bound.
    pub fn guard_margin(&self, y: CartesianPoint) -> f64 {
        let mut best = f64::INFINITY;
        if self.nodes.is_empty() {
            return best;
        }
        let q = arr(y);
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            let nd = &self.nodes[k];
            if nd.max_diam == 0.0 || box_distance(nd, q) / nd.max_diam >= best {
                continue;
            }
            if let Some((a, b)) = nd.children {
                let (da, db) = (box_distance(&self.nodes[a], q), box_distance(&self.nodes[b], q));
                if da <= db {
                    stack.push(b);
                    stack.push(a);
                } else {
                    stack.push(a);
                    stack.push(b);
                }
            } else {
                for &t in &self.order[nd.start..nd.end] {
                    let tri = &self.surface.triangles[t as usize];
                    if tri.diameter == 0.0 {
                        continue;
                    }
                    let [a, b, c] = self.vertices(t);
                    let m = point_triangle_distance(y, a, b, c) / tri.diameter;
                    if m < best {
                        best = m;
                    }
                }
            }
        }
        best
    }
}

fn box_distance(nd: &Node, q: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        let d = (nd.lo[i] - q[i]).max(q[i] - nd.hi[i]).max(0.0);
        s += d * d;
    }
    sqrt(s)
}

/// Solid angle of a cluster seen from `q`, where `d = center - q`.
fn far_field(nd: &Node, d: [f64; 3], r2: f64) -> f64 {
    let r = sqrt(r2);
    let r3 = r2 * r;
    let r5 = r3 * r2;
    let r7 = r5 * r2;
    let mut s = (nd.area[0] * d[0] + nd.area[1] * d[1] + nd.area[2] * d[2]) / r3;
    let mut trace = 0.0;
    let mut dmd = 0.0;
    for i in 0..3 {
        trace += nd.m[i][i];
        for j in 0..3 {
            dmd += d[i] * nd.m[i][j] * d[j];
        }
    }
    s += trace / r3 - 3.0 * dmd / r5;
    let mut nij_j = 0.0;
    let mut n_ijj = 0.0;
    let mut dddn = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            nij_j += nd.n[i][i][j] * d[j];
            n_ijj += d[i] * nd.n[i][j][j];
            for k in 0..3 {
                dddn += d[i] * d[j] * d[k] * nd.n[i][j][k];
            }
        }
    }
    s + 0.5 * (-3.0 * (2.0 * nij_j + n_ijj) / r5 + 15.0 * dddn / r7)
}

fn build(s: &ImageSurface, order: &mut [u32], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let tris = &s.triangles;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut clo = [f64::INFINITY; 3];
    let mut chi = [f64::NEG_INFINITY; 3];
    let mut wsum = 0.0;
    let mut wc = [0.0; 3];
    let mut area = [0.0; 3];
    let mut max_diam: f64 = 0.0;
    for &t in &order[start..end] {
        let tri = &tris[t as usize];
        for v in tri.vertices {
            let p = arr(s.image_vertices[v as usize]);
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let c = arr(tri.centroid);
        let a = arr(tri.area_vector);
        let w = tri.area_vector.norm();
        for i in 0..3 {
            clo[i] = clo[i].min(c[i]);
            chi[i] = chi[i].max(c[i]);
            wc[i] += w * c[i];
            area[i] += a[i];
        }
        wsum += w;
        max_diam = max_diam.max(tri.diameter);
    }
    let center = if wsum > 0.0 {
        [wc[0] / wsum, wc[1] / wsum, wc[2] / wsum]
    } else {
        [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])]
    };
    let ctr = CartesianPoint::new(center[0], center[1], center[2]);
    let mut radius: f64 = 0.0;
    let mut m = [[0.0; 3]; 3];
    let mut n = [[[0.0; 3]; 3]; 3];
    for &t in &order[start..end] {
        let tri = &tris[t as usize];
        radius = radius.max(tri.centroid.dist(ctr) + tri.bound_radius);
        let a = arr(tri.area_vector);
        let e = arr(tri.centroid.sub(ctr));
        let vs = tri.vertices.map(|v| arr(s.image_vertices[v as usize].sub(tri.centroid)));
        let mut sm = [[0.0; 3]; 3];
        for v in &vs {
            for j in 0..3 {
                for k in 0..3 {
                    sm[j][k] += v[j] * v[k] / 12.0;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += a[i] * e[j];
                for k in 0..3 {
                    n[i][j][k] += a[i] * (e[j] * e[k] + sm[j][k]);
                }
            }
        }
    }
    let idx = nodes.len();
    nodes.push(Node {
        lo,
        hi,
        center,
        radius,
        area,
        m,
        n,
        max_diam,
        start,
        end,
        children: None,
    });
    if end - start > LEAF {
        let axis = (0..3)
            .max_by(|&i, &j| (chi[i] - clo[i]).total_cmp(&(chi[j] - clo[j])))
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let key = |t: &u32| tris[*t as usize].centroid.to_array()[axis];
        order[start..end].select_nth_unstable_by(mid - start, |a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
        let a = build(s, order, start, mid, nodes);
        let b = build(s, order, mid, end, nodes);
        nodes[idx].children = Some((a, b));
    }
    idx
}
