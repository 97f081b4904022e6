use alloc::vec::Vec;

use crate::map::{AxisymmetricMap, Patch, Region};

/// Number of geometric levels laid down toward each singular edge before
/// adaptive refinement starts.
pub const INITIAL_GRADING: u32 = 20;

/// A rectangle in the coordinates `(r, t)` of one patch, where
/// `α = lower(r) + t (upper(r) - lower(r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub patch: usize,
    pub r: (f64, f64),
    pub t: (f64, f64),
    /// Number of halvings in `r` and `t` relative to the base grid.
    pub depth: (u32, u32),
}

impl Cell {
    pub fn split_r(&self) -> [Cell; 2] {
        let m = 0.5 * (self.r.0 + self.r.1);
        let d = (self.depth.0 + 1, self.depth.1);
        [
            Cell {
                r: (self.r.0, m),
                depth: d,
                ..*self
            },
            Cell {
                r: (m, self.r.1),
                depth: d,
                ..*self
            },
        ]
    }

    pub fn split_t(&self) -> [Cell; 2] {
        let m = 0.5 * (self.t.0 + self.t.1);
        let d = (self.depth.0, self.depth.1 + 1);
        [
            Cell {
                t: (self.t.0, m),
                depth: d,
                ..*self
            },
            Cell {
                t: (m, self.t.1),
                depth: d,
                ..*self
            },
        ]
    }
}

/// Boundary-aligned tiling of the `(r, α)` half-plane into cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDecomposition {
    pub patches: Vec<Patch>,
    pub cells: Vec<Cell>,
}

impl CellDecomposition {
    pub fn region_of(&self, cell: &Cell) -> Region {
        self.patches[cell.patch].region
    }
}

/// Breakpoints of `[0, 1]`: `n` uniform intervals, with the end intervals
/// replaced by `levels` geometric halvings where requested.
fn breakpoints(n: usize, grade_lo: bool, grade_hi: bool, levels: u32) -> Vec<(f64, f64, u32)> {
    let h = 1.0 / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let lo_end = i == 0 && grade_lo;
        let hi_end = i + 1 == n && grade_hi;
        if lo_end && hi_end {
            let m = 0.5 * (a + b);
            graded_lo(&mut out, a, m, levels);
            graded_hi(&mut out, m, b, levels);
        } else if lo_end {
            graded_lo(&mut out, a, b, levels);
        } else if hi_end {
            graded_hi(&mut out, a, b, levels);
        } else {
            out.push((a, b, 0));
        }
    }
    out
}

fn graded_lo(out: &mut Vec<(f64, f64, u32)>, a: f64, b: f64, levels: u32) {
    let mut cuts = Vec::new();
    let mut w = b - a;
    for _ in 0..levels {
        w *= 0.5;
        cuts.push(a + w);
    }
    out.push((a, *cuts.last().unwrap_or(&b), levels));
    for k in (0..cuts.len()).rev() {
        let hi = if k == 0 { b } else { cuts[k - 1] };
        out.push((cuts[k], hi, k as u32 + 1));
    }
}

fn graded_hi(out: &mut Vec<(f64, f64, u32)>, a: f64, b: f64, levels: u32) {
    let mut w = b - a;
    let mut lo = a;
    for k in 0..levels {
        w *= 0.5;
        out.push((lo, b - w, k + 1));
        lo = b - w;
    }
    out.push((lo, b, levels));
}

/// Tiles every patch of `map` with a `base_resolution` grid in `(r, t)`,
/// geometrically graded (ratio 1/2) toward the patch's singular edges.
pub fn region_cells<M: AxisymmetricMap + ?Sized>(
    map: &M,
    base_resolution: usize,
) -> CellDecomposition {
    region_cells_with(map, base_resolution, INITIAL_GRADING, None)
}

pub(crate) fn region_cells_with<M: AxisymmetricMap + ?Sized>(
    map: &M,
    base_resolution: usize,
    levels: u32,
    only: Option<&[Region]>,
) -> CellDecomposition {
    let n = base_resolution.max(1);
    let patches = map.patches();
    let mut cells = Vec::new();
    for (k, p) in patches.iter().enumerate() {
        if let Some(only) = only {
            if !only.contains(&p.region) {
                continue;
            }
        }
        let rs = breakpoints(n, p.grading.r_lo, p.grading.r_hi, levels);
        let ts = breakpoints(n, p.grading.t_lo, p.grading.t_hi, levels);
        let span = p.r_hi - p.r_lo;
        for &(r0, r1, dr) in &rs {
            for &(t0, t1, dt) in &ts {
                cells.push(Cell {
                    patch: k,
                    r: (p.r_lo + r0 * span, if r1 == 1.0 { p.r_hi } else { p.r_lo + r1 * span }),
                    t: (t0, t1),
                    depth: (dr, dt),
                });
            }
        }
    }
    CellDecomposition { patches, cells }
}
