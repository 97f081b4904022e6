use super::integrate::{integrate_energy, EnergyEntry, Functional, QuadratureOptions};
use crate::exec::Executor;
use crate::map::AxisymmetricMap;
use crate::math::{cos, pow, sin, sqrt, PI};
use crate::Result;

/// Radial bump `u(y) = φ(|y - c| / ρ)` with `φ(s) = (1 - s²)³` on the unit
/// ball, centered at `c = (0, 0, center_z)` so that it respects the axial
/// symmetry of the maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center_z: f64,
    pub radius: f64,
}

impl Bump {
    pub const BUILTIN: [Bump; 3] = [
        Bump {
            center_z: 0.0,
            radius: 0.2,
        },
        Bump {
            center_z: -0.4,
            radius: 0.3,
        },
        Bump {
            center_z: 0.0,
            radius: 1.5,
        },
    ];

    fn profile_slope(s: f64) -> f64 {
        let q = 1.0 - s * s;
        6.0 * s * q * q
    }

    /// `|Du|` at the point with spherical coordinates `(r, α)`.
    pub fn grad_norm_at(&self, r: f64, alpha: f64) -> f64 {
        let x = r * sin(alpha);
        let z = r * cos(alpha) - self.center_z;
        let s = sqrt(x * x + z * z) / self.radius;
        if s >= 1.0 {
            0.0
        } else {
            Self::profile_slope(s) / self.radius
        }
    }

    /// `‖Du‖_{L³}` by composite Gauss–Legendre in the radial variable.
    pub fn grad_l3_norm(&self) -> f64 {
        const NODES: [f64; 4] = [
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            -0.861_136_311_594_052_6,
        ];
        const WEIGHTS: [f64; 4] = [
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
        ];
        let n = 64;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let c = (k as f64 + 0.5) * h;
            for i in 0..4 {
                let s = c + 0.5 * h * NODES[i];
                acc += 0.5 * h * WEIGHTS[i] * pow(Self::profile_slope(s), 3.0) * s * s;
            }
        }
        pow(4.0 * PI * acc, 1.0 / 3.0)
    }
}

/// Both sides of `∫|D(u∘f)| <= ‖Du‖_{L³} (∫K^{1/2})^{2/3}` for a bump `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct KmCheck {
    pub bump: Bump,
    /// `∫ |Du(f)| |Df|`, an upper bound for `∫|D(u∘f)|`.
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub grad_l3: f64,
    pub distortion: f64,
    pub holds: bool,
    pub converged: bool,
}

/// Evaluates the inequality for `bump`, reusing an already integrated
/// distortion energy when given.
pub fn km_inequality_check<M, E>(
    map: &M,
    bump: Bump,
    distortion: Option<&EnergyEntry>,
    opts: &QuadratureOptions,
    exec: &E,
) -> Result<KmCheck>
where
    M: AxisymmetricMap + ?Sized,
    E: Executor,
{
    let owned;
    let dist = match distortion {
        Some(d) => d,
        None => {
            owned = integrate_energy(map, Functional::Distortion, opts, exec)?;
            &owned
        }
    };
    let lhs = integrate_energy(map, Functional::BumpGradient(bump), opts, exec)?;
    let grad_l3 = bump.grad_l3_norm();
    let rhs = grad_l3 * pow(dist.total, 2.0 / 3.0);
    Ok(KmCheck {
        bump,
        lhs: lhs.total,
        lhs_error: lhs.est_error,
        rhs,
        grad_l3,
        distortion: dist.total,
        holds: lhs.total <= rhs * (1.0 + opts.tol),
        converged: lhs.converged && dist.converged,
    })
}
