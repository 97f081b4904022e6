use alloc::vec;
use alloc::vec::Vec;

use super::mesh::{triangulate_disk, PlanarMesh};
use crate::geometry::CartesianPoint;
use crate::math::{sin, sqrt, FRAC_PI_2};
use crate::{Error, Result};

/// Caps must have chordal diameter below this fraction of the sphere radius.
pub const CAP_DIAMETER_FRACTION: f64 = 1.0 / 12.0;

/// Relative residual the conjugate gradient iteration aims for.
const CG_TARGET: f64 = 1e-14;
/// Relative residual below which a solve is accepted.
pub const CG_ACCEPT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapGeometry {
    /// Flat disk of the given radius in the plane `x₃ = 0`.
    Disk { radius: f64 },
    /// Cap of the sphere of radius `sphere_radius` about the origin,
    /// centered on the positive `x₃` axis, of angular radius `angle`.
    Cap { sphere_radius: f64, angle: f64 },
}

impl CapGeometry {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CapGeometry::Disk { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidParameter(alloc::format!("disk radius {radius}")));
                }
            }
            CapGeometry::Cap { sphere_radius, angle } => {
                if !(sphere_radius > 0.0 && sphere_radius.is_finite()) || !(angle > 0.0 && angle < FRAC_PI_2) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "cap of sphere radius {sphere_radius} and angle {angle}"
                    )));
                }
                let limit = CAP_DIAMETER_FRACTION * sphere_radius;
                let diameter = self.diameter();
                if !(diameter < limit) {
                    return Err(Error::CapTooLarge { diameter, limit });
                }
            }
        }
        Ok(())
    }

    /// Euclidean diameter of the disk or cap.
    pub fn diameter(&self) -> f64 {
        2.0 * self.chart_radius()
    }

    /// Radius of the planar chart: the disk itself, or the projection of the
    /// cap onto the plane orthogonal to its axis.
    pub fn chart_radius(&self) -> f64 {
        match *self {
            CapGeometry::Disk { radius } => radius,
            CapGeometry::Cap { sphere_radius, angle } => sphere_radius * sin(angle),
        }
    }

    /// Point of the disk or cap above the chart point `x`.
    pub fn lift(&self, x: [f64; 2]) -> CartesianPoint {
        match *self {
            CapGeometry::Disk { .. } => CartesianPoint::new(x[0], x[1], 0.0),
            CapGeometry::Cap { sphere_radius, .. } => {
                let z2 = sphere_radius * sphere_radius - x[0] * x[0] - x[1] * x[1];
                CartesianPoint::new(x[0], x[1], sqrt(z2.max(0.0)))
            }
        }
    }

    /// Coefficient matrix of the energy density in chart coordinates:
    /// the identity, or `I - x xᵀ / r²` on caps.
    pub fn coefficient(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        match *self {
            CapGeometry::Disk { .. } => [[1.0, 0.0], [0.0, 1.0]],
            CapGeometry::Cap { sphere_radius, .. } => {
                let s = 1.0 / (sphere_radius * sphere_radius);
                [
                    [1.0 - s * x[0] * x[0], -s * x[0] * x[1]],
                    [-s * x[1] * x[0], 1.0 - s * x[1] * x[1]],
                ]
            }
        }
    }
}

/// Boundary data: maps a point of the boundary circle (in space) to three
/// target coordinates.
pub type Trace<'a> = &'a (dyn Fn(CartesianPoint) -> [f64; 3] + Sync);

#[derive(Clone, Copy)]
pub struct CapProblem<'a> {
    pub geometry: CapGeometry,
    pub trace: Trace<'a>,
    pub mesh_h: f64,
}

impl core::fmt::Debug for CapProblem<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CapProblem")
            .field("geometry", &self.geometry)
            .field("mesh_h", &self.mesh_h)
            .finish_non_exhaustive()
    }
}

/// Symmetric sparse matrix in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Stiffness {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Stiffness {
    pub fn assemble(mesh: &PlanarMesh, geometry: &CapGeometry) -> Self {
        let n = mesh.nodes.len();
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for t in &mesh.triangles {
            let p = t.map(|i| mesh.nodes[i as usize]);
            let twice = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
            let area = 0.5 * twice;
            let grads: [[f64; 2]; 3] = core::array::from_fn(|i| {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                [(p[j][1] - p[k][1]) / twice, (p[k][0] - p[j][0]) / twice]
            });
            let mut a = [[0.0; 2]; 2];
            for e in 0..3 {
                let (u, v) = (p[e], p[(e + 1) % 3]);
                let c = geometry.coefficient([0.5 * (u[0] + v[0]), 0.5 * (u[1] + v[1])]);
                for r in 0..2 {
                    for s in 0..2 {
                        a[r][s] += area * c[r][s] / 3.0;
                    }
                }
            }
            for i in 0..3 {
                let ag = [
                    a[0][0] * grads[i][0] + a[0][1] * grads[i][1],
                    a[1][0] * grads[i][0] + a[1][1] * grads[i][1],
                ];
                for j in 0..3 {
                    let v = ag[0] * grads[j][0] + ag[1] * grads[j][1];
                    rows[t[i] as usize].push((t[j], v));
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut s = 0.0;
                while k < row.len() && row[k].0 == c {
                    s += row[k].1;
                    k += 1;
                }
                cols.push(c);
                vals.push(s);
            }
            row_ptr.push(cols.len());
        }
        Stiffness { row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().map(|&c| c as usize).zip(self.vals[r].iter().copied())
    }

    /// `uᵀ K u`, evaluated as `-½ Σ K_ij (u_i - u_j)²` using the zero row
    /// sums, so that constants have exactly zero energy.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.dim() {
            for (j, v) in self.row(i) {
                if j != i {
                    let d = u[i] - u[j];
                    e -= 0.5 * v * d * d;
                }
            }
        }
        e
    }

    /// Whether rows `first..` have no positive off-diagonal entry, up to
    /// rounding relative to the diagonal.
    fn is_m_matrix_from(&self, first: usize) -> bool {
        (first..self.dim()).all(|i| {
            let diag = self.row(i).find(|&(j, _)| j == i).map_or(0.0, |e| e.1);
            diag > 0.0 && self.row(i).all(|(j, v)| j == i || v <= 1e-12 * diag)
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves for interior values (nodes `nb..`) with the boundary values fixed,
/// by Jacobi-preconditioned conjugate gradients. Returns the relative
/// residual and iteration count.
fn solve_scalar(k: &Stiffness, nb: usize, u: &mut [f64]) -> Result<(f64, usize)> {
    let n = k.dim();
    let m = n - nb;
    if m == 0 {
        return Ok((0.0, 0));
    }
    let mut b = vec![0.0; m];
    let mut diag = vec![0.0; m];
    for i in 0..m {
        for (j, v) in k.row(nb + i) {
            if j < nb {
                b[i] -= v * u[j];
            } else if j == nb + i {
                diag[i] = v;
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            out[i] = k.row(nb + i).filter(|&(j, _)| j >= nb).map(|(j, v)| v * x[j - nb]).sum();
        }
    };
    let bnorm = sqrt(dot(&b, &b));
    let mut x: Vec<f64> = u[nb..].to_vec();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        u[nb..].copy_from_slice(&x);
        return Ok((0.0, 0));
    }
    let mut ax = vec![0.0; m];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = (0..m).map(|i| b[i] - ax[i]).collect();
    let mut z: Vec<f64> = (0..m).map(|i| r[i] / diag[i]).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; m];
    let max_iter = 10 * m + 100;
    let mut rel = sqrt(dot(&r, &r)) / bnorm;
    let mut it = 0;
    while rel > CG_TARGET && it < max_iter {
        apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            break;
        }
        let alpha = rz / pq;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        it += 1;
        rel = sqrt(dot(&r, &r)) / bnorm;
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    apply(&x, &mut ax);
    let rel = sqrt((0..m).map(|i| (b[i] - ax[i]) * (b[i] - ax[i])).sum::<f64>()) / bnorm;
    if !(rel < CG_ACCEPT) {
        return Err(Error::SolverDiverged {
            residual: rel,
            iterations: it,
        });
    }
    u[nb..].copy_from_slice(&x);
    Ok((rel, it))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapSolution {
    pub geometry: CapGeometry,
    pub mesh: PlanarMesh,
    pub stiffness: Stiffness,
    /// Nodal values, one triple per mesh node.
    pub values: Vec<[f64; 3]>,
    /// Discrete tangential Dirichlet energy summed over components.
    pub energy: f64,
    /// Largest relative residual of the three linear solves.
    pub solver_residual: f64,
    pub iterations: usize,
}

fn diameter(points: &[[f64; 3]]) -> f64 {
    let mut d2: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let s = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]);
            d2 = d2.max(s);
        }
    }
    sqrt(d2)
}

impl CapSolution {
    /// Energy of other nodal values on the same mesh.
    pub fn energy_of(&self, values: &[[f64; 3]]) -> f64 {
        (0..3)
            .map(|c| {
                let u: Vec<f64> = values.iter().map(|v| v[c]).collect();
                self.stiffness.energy(&u)
            })
            .sum()
    }

    /// Diameter of the set of nodal values.
    pub fn image_diameter(&self) -> f64 {
        diameter(&self.values)
    }

    /// Diameter of the boundary nodal values, which equal the trace samples.
    pub fn trace_diameter(&self) -> f64 {
        diameter(&self.values[..self.mesh.n_boundary])
    }

    /// Nodes of the mesh lifted onto the disk or cap.
    pub fn lifted_nodes(&self) -> Vec<CartesianPoint> {
        self.mesh.nodes.iter().map(|&x| self.geometry.lift(x)).collect()
    }
}

/// Minimizes the discrete energy of each component with the boundary nodes
/// pinned to the trace.
pub fn solve_cap(problem: &CapProblem<'_>) -> Result<CapSolution> {
    problem.geometry.validate()?;
    let mesh = triangulate_disk(problem.geometry.chart_radius(), problem.mesh_h)?;
    solve_on_mesh(problem.geometry, problem.trace, mesh)
}

/// [`solve_cap`] on a given chart mesh whose first `n_boundary` nodes lie on
/// the boundary circle.
pub fn solve_on_mesh(geometry: CapGeometry, trace: Trace<'_>, mesh: PlanarMesh) -> Result<CapSolution> {
    geometry.validate()?;
    let stiffness = Stiffness::assemble(&mesh, &geometry);
    let nb = mesh.n_boundary;
    if !stiffness.is_m_matrix_from(nb) {
        return Err(Error::NotMMatrix);
    }
    let n = mesh.nodes.len();
    let mut values = vec![[0.0; 3]; n];
    for i in 0..nb {
        let v = trace(geometry.lift(mesh.nodes[i]));
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("boundary trace is not finite at node {i}")));
        }
        values[i] = v;
    }
    let mut solver_residual: f64 = 0.0;
    let mut iterations = 0;
    for c in 0..3 {
        let mut u: Vec<f64> = values.iter().map(|v| v[c]).collect();
        let (res, it) = solve_scalar(&stiffness, nb, &mut u)?;
        solver_residual = solver_residual.max(res);
        iterations = iterations.max(it);
        for (v, x) in values.iter_mut().zip(u) {
            v[c] = x;
        }
    }
    let energy = (0..3)
        .map(|c| stiffness.energy(&values.iter().map(|v| v[c]).collect::<Vec<_>>()))
        .sum();
    Ok(CapSolution {
        geometry,
        mesh,
        stiffness,
        values,
        energy,
        solver_residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn disk(radius: f64) -> CapGeometry {
        CapGeometry::Disk { radius }
    }

    fn solve(g: CapGeometry, h: f64, trace: Trace<'_>) -> CapSolution {
        solve_cap(&CapProblem {
            geometry: g,
            trace,
            mesh_h: h,
        })
        .unwrap()
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        let s = solve(disk(1.0), 0.1, &|_| [1.5, -2.0, 0.25]);
        for v in &s.values {
            assert!((v[0] - 1.5).abs() < 1e-12 && (v[1] + 2.0).abs() < 1e-12 && (v[2] - 0.25).abs() < 1e-12);
        }
        assert!(s.energy.abs() < 1e-20);
    }

    #[test]
    fn linear_data_is_reproduced() {
        let s = solve(disk(1.0), 0.05, &|p| [p.x, p.y, 2.0 * p.x - 3.0 * p.y + 1.0]);
        for (x, v) in s.mesh.nodes.iter().zip(&s.values) {
            assert!((v[0] - x[0]).abs() < 1e-12);
            assert!((v[1] - x[1]).abs() < 1e-12);
            assert!((v[2] - (2.0 * x[0] - 3.0 * x[1] + 1.0)).abs() < 1e-12);
        }
        assert!(s.solver_residual < CG_ACCEPT);
    }

    #[test]
    fn quadratic_harmonic_is_second_order() {
        let f = |p: CartesianPoint| [p.x * p.x - p.y * p.y, p.x * p.y, 0.0];
        let err = |h: f64| {
            let s = solve(disk(1.0), h, &f);
            s.mesh
                .nodes
                .iter()
                .zip(&s.values)
                .map(|(x, v)| (v[0] - (x[0] * x[0] - x[1] * x[1])).abs().max((v[1] - x[0] * x[1]).abs()))
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(0.08), err(0.02));
        assert!(fine < 1e-3, "{fine}");
        assert!(coarse / fine > 6.0, "{coarse} {fine}");
    }

    #[test]
    fn dirichlet_energy_of_linear_map() {
        let s = solve(disk(2.0), 0.1, &|p| [p.x, 0.0, 0.0]);
        let polygon = s.mesh.area();
        assert!((s.energy - polygon).abs() < 1e-10 * polygon);
    }

    #[test]
    fn cap_size_is_enforced() {
        let big = CapGeometry::Cap {
            sphere_radius: 1.0,
            angle: 0.1,
        };
        assert!(matches!(big.validate(), Err(Error::CapTooLarge { .. })));
        let small = CapGeometry::Cap {
            sphere_radius: 1.0,
            angle: 0.04,
        };
        assert!(small.validate().is_ok());
        assert!(CapGeometry::Disk { radius: -1.0 }.validate().is_err());
    }

    #[test]
    fn cap_coefficient_is_tangential_metric() {
        let g = CapGeometry::Cap {
            sphere_radius: 2.0,
            angle: 0.04,
        };
        let x = [0.05, -0.03];
        let a = g.coefficient(x);
        let v = [x[0], x[1]];
        let av = [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]];
        let s = (x[0] * x[0] + x[1] * x[1]) / 4.0;
        assert!((av[0] - (1.0 - s) * v[0]).abs() < 1e-15 && (av[1] - (1.0 - s) * v[1]).abs() < 1e-15);
        assert!((g.lift(x).norm() - 2.0).abs() < 1e-15);
    }

    fn cap() -> CapGeometry {
        CapGeometry::Cap {
            sphere_radius: 1.0,
            angle: 0.04,
        }
    }

    #[test]
    fn minimizer_beats_competitors() {
        let f = |p: CartesianPoint| [sin(40.0 * p.x), p.y * p.y * 100.0, p.x * p.y * 300.0];
        let s = solve(cap(), 0.004, &f);
        let n = s.values.len();
        for k in 1..5 {
            let mut other = s.values.clone();
            for i in s.mesh.n_boundary..n {
                let w = sin(k as f64 * i as f64);
                other[i] = [other[i][0] + 1e-3 * w, other[i][1] - 2e-3 * w, other[i][2] + 1e-3];
            }
            assert!(s.energy_of(&other) > s.energy);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn maximum_and_oscillation_bounds(a in -5.0f64..5.0, b in -5.0f64..5.0, k in 1.0f64..80.0) {
            let f = move |p: CartesianPoint| [sin(k * p.x + a), b * p.y * 30.0, sin(k * p.y) * sin(k * p.x)];
            let s = solve(cap(), 0.005, &f);
            let nb = s.mesh.n_boundary;
            for c in 0..3 {
                let lo = s.values[..nb].iter().map(|v| v[c]).fold(f64::INFINITY, f64::min);
                let hi = s.values[..nb].iter().map(|v| v[c]).fold(f64::NEG_INFINITY, f64::max);
                for v in &s.values {
                    prop_assert!(v[c] >= lo - 1e-12 && v[c] <= hi + 1e-12);
                }
            }
            prop_assert!(s.image_diameter() <= sqrt(3.0) * s.trace_diameter() + 1e-9);
        }

        #[test]
        fn comparison_and_boundary_stability(shift in 0.0f64..0.5, k in 1.0f64..60.0) {
            let u = move |p: CartesianPoint| [sin(k * p.x) * p.y * 10.0, 0.0, 0.0];
            let v = move |p: CartesianPoint| [sin(k * p.x) * p.y * 10.0 + shift * (1.0 + sin(k * p.y)), 0.0, 0.0];
            let su = solve(cap(), 0.005, &u);
            let sv = solve(cap(), 0.005, &v);
            let delta = su.values[..su.mesh.n_boundary]
                .iter()
                .zip(&sv.values)
                .map(|(a, b)| (a[0] - b[0]).abs())
                .fold(0.0, f64::max);
            for (a, b) in su.values.iter().zip(&sv.values) {
                prop_assert!(a[0] <= b[0] + 1e-12);
                prop_assert!((a[0] - b[0]).abs() <= delta + 1e-12);
            }
        }
    }
}
