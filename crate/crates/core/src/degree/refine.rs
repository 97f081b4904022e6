use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::mesh::{ImageSurface, TriangulatedSphere};
use crate::exec::Executor;
use crate::geometry::CartesianPoint;
use crate::map::PointMap;
use crate::{Error, Result};

/// Targets for [`refine_for_image`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Longest accepted image edge.
    pub max_image_edge: f64,
    /// Largest accepted distance between the image of an edge midpoint and
    /// the midpoint of the image edge, as a fraction of `max_image_edge`.
    pub bend_fraction: f64,
    pub max_triangles: usize,
    pub max_rounds: usize,
}

impl RefineOptions {
    pub fn new(max_image_edge: f64) -> Self {
        RefineOptions {
            max_image_edge,
            bend_fraction: 0.25,
            max_triangles: 4_000_000,
            max_rounds: 200,
        }
    }
}

fn longest(t: [u32; 3], len: &impl Fn(u32, u32) -> f64) -> (u32, u32) {
    let mut best = (t[0].min(t[1]), t[0].max(t[1]));
    let mut lb = len(t[0], t[1]);
    for k in 1..3 {
        let (i, j) = (t[k], t[(k + 1) % 3]);
        let l = len(i, j);
        let key = (i.min(j), i.max(j));
        if l > lb || (l == lb && key < best) {
            best = key;
            lb = l;
        }
    }
    best
}

/// Splits `t` on its longest marked edge, then recurses into both halves.
fn bisect(t: [u32; 3], mids: &BTreeMap<(u32, u32), u32>, len: &impl Fn(u32, u32) -> f64, out: &mut Vec<[u32; 3]>) {
    let mut pick: Option<(usize, f64)> = None;
    for k in 0..3 {
        let (i, j) = (t[k], t[(k + 1) % 3]);
        if mids.contains_key(&(i.min(j), i.max(j))) {
            let l = len(i, j);
            if pick.map_or(true, |(_, b)| l > b) {
                pick = Some((k, l));
            }
        }
    }
    match pick {
        Some((k, _)) => {
            let (i, j, o) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let m = mids[&(i.min(j), i.max(j))];
            bisect([i, m, o], mids, len, out);
            bisect([m, j, o], mids, len, out);
        }
        None => out.push(t),
    }
}

/// Refines `mesh` by conforming edge bisection until every image edge is
/// shorter than `max_image_edge` and bends by less than the given fraction
/// of it. New vertices are projected back onto the sphere. The result is
/// again a closed, consistently oriented triangulation.
pub fn refine_for_image<M, E>(map: &M, mesh: &TriangulatedSphere, opts: &RefineOptions, exec: &E) -> Result<ImageSurface>
where
    M: PointMap + ?Sized,
    E: Executor,
{
    if !(opts.max_image_edge > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "image edge bound must be positive, got {}",
            opts.max_image_edge
        )));
    }
    let mut verts = mesh.vertices.clone();
    let mut tris = mesh.triangles.clone();
    let mapped = exec.map_indexed(verts.len(), &|i| map.map_point(verts[i]));
    let mut imgs = mapped.into_iter().collect::<Result<Vec<_>>>()?;
    let on_sphere = |p: CartesianPoint| {
        let d = p.sub(mesh.center);
        mesh.center.add(d.scale(mesh.radius / d.norm()))
    };
    for _ in 0..opts.max_rounds {
        let mut edges: BTreeMap<(u32, u32), ()> = BTreeMap::new();
        for t in &tris {
            for k in 0..3 {
                let (i, j) = (t[k], t[(k + 1) % 3]);
                edges.insert((i.min(j), i.max(j)), ());
            }
        }
        let edges: Vec<(u32, u32)> = edges.into_keys().collect();
        let candidates = exec.map_indexed(edges.len(), &|k| -> Result<(CartesianPoint, CartesianPoint, bool)> {
            let (i, j) = edges[k];
            let (fa, fb) = (imgs[i as usize], imgs[j as usize]);
            let mid = on_sphere(verts[i as usize].add(verts[j as usize]).scale(0.5));
            let fm = map.map_point(mid)?;
            let long = fa.dist(fb) > opts.max_image_edge;
            let bent = fm.dist(fa.add(fb).scale(0.5)) > opts.bend_fraction * opts.max_image_edge;
            Ok((mid, fm, long || bent))
        });
        let len = |i: u32, j: u32| imgs[i as usize].dist(imgs[j as usize]);
        let mut marked: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut found = Vec::with_capacity(edges.len());
        for (k, c) in candidates.into_iter().enumerate() {
            let (mid, fm, flag) = c?;
            if flag {
                marked.insert(edges[k]);
            }
            found.push((mid, fm));
        }
        if marked.is_empty() {
            let source = TriangulatedSphere {
                center: mesh.center,
                radius: mesh.radius,
                vertices: verts,
                triangles: tris,
                level: mesh.level,
            };
            return ImageSurface::from_vertices(source, imgs);
        }
        loop {
            let mut grew = false;
            for &t in &tris {
                let touched = (0..3).any(|k| {
                    let (i, j) = (t[k], t[(k + 1) % 3]);
                    marked.contains(&(i.min(j), i.max(j)))
                });
                if touched && marked.insert(longest(t, &len)) {
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let mut mids = BTreeMap::new();
        for (k, e) in edges.iter().enumerate() {
            if marked.contains(e) {
                let (mid, fm) = found[k];
                verts.push(mid);
                imgs.push(fm);
                mids.insert(*e, (verts.len() - 1) as u32);
            }
        }
        let len = |i: u32, j: u32| imgs[i as usize].dist(imgs[j as usize]);
        let mut next = Vec::with_capacity(tris.len() + 2 * mids.len());
        for &t in &tris {
            bisect(t, &mids, &len, &mut next);
        }
        tris = next;
        if tris.len() > opts.max_triangles {
            return Err(Error::InvalidParameter(alloc::format!(
                "refinement exceeded {} triangles",
                opts.max_triangles
            )));
        }
    }
    Err(Error::InvalidParameter(alloc::format!(
        "refinement did not settle in {} rounds",
        opts.max_rounds
    )))
}
