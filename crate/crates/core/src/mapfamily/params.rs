use alloc::format;

use crate::math::{pow, PI};
use crate::{Error, Result};

/// Largest admissible family parameter.
pub const EPS_MAX: f64 = 0.4;

/// Parameters of one member `f_ε` of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub eps: f64,
    /// Exponent of the Jacobian penalty `J^{-a}` the family is tuned for.
    pub a: f64,
    /// Hölder exponent used in the angular profile `ξ^p`.
    pub p: f64,
    /// Exponent of the strip thickness near `r = 2`.
    pub lambda: f64,
    /// Matching constant making the strip thickness continuous at `r1`.
    pub c0: f64,
    /// Radius where the angular amplitude `ψ` stops growing linearly.
    pub r0: f64,
    /// Radius where the strip leaves the south pole region.
    pub r1: f64,
}

/// Open interval of admissible Hölder exponents for a given `a`.
pub fn admissible_p(a: f64) -> (f64, f64) {
    (0.5, ((a + 1.0) / (3.0 * a)).min(1.0))
}

pub fn make_params(eps: f64, a: f64, p: Option<f64>) -> Result<MapParams> {
    if !(eps > 0.0 && eps <= EPS_MAX) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside (0, {EPS_MAX}]"
        )));
    }
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "a = {a} outside (0, 2): the admissible exponent interval is empty"
        )));
    }
    let (lo, hi) = admissible_p(a);
    let p = match p {
        Some(p) if p > lo && p < hi => p,
        Some(p) => {
            return Err(Error::InvalidParameter(format!(
                "p = {p} outside the admissible interval ({lo}, {hi})"
            )))
        }
        None => 0.5 * (lo + hi),
    };
    let lambda = 2.0 / (1.0 + a - 3.0 * a * p);
    let c0 = PI / (PI - eps) * pow((PI - eps) / (PI - 2.0 * eps), lambda);
    let r1 = 1.0 + eps / (PI - eps);
    let r0 = (eps - 2.0 * eps * eps) / (1.0 - eps * eps);
    Ok(MapParams {
        eps,
        a,
        p,
        lambda,
        c0,
        r0,
        r1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn default_parameters_for_unit_exponent() {
        let m = make_params(0.1, 1.0, None).unwrap();
        assert_relative_eq!(m.p, 7.0 / 12.0, max_relative = 1e-15);
        assert_relative_eq!(m.lambda, 8.0, max_relative = 1e-12);
        assert_relative_eq!(m.r1, 1.032_88, max_relative = 1e-5);
        assert_relative_eq!(m.r0, 0.080_808, max_relative = 1e-5);
    }

    #[test]
    fn explicit_exponent() {
        let m = make_params(0.1, 1.0, Some(0.6)).unwrap();
        assert_relative_eq!(m.lambda, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_params(0.1, 2.0, None).is_err());
        assert!(make_params(0.1, 1.0, Some(0.7)).is_err());
        assert!(make_params(0.1, 1.0, Some(0.5)).is_err());
        assert!(make_params(0.5, 1.0, None).is_err());
        assert!(make_params(0.0, 1.0, None).is_err());
    }

    proptest! {
        #[test]
        fn invariants_hold(eps in 1e-4f64..=0.4, a in 0.05f64..1.95, s in 0.01f64..0.99) {
            let (lo, hi) = admissible_p(a);
            let m = make_params(eps, a, Some(lo + s * (hi - lo))).unwrap();
            prop_assert!(m.p > 0.5 && m.p < 1.0);
            prop_assert!(m.a * (1.0 - 3.0 * m.p) > -1.0);
            prop_assert!(m.lambda > 2.0);
            prop_assert!(m.r1 > 1.0 && m.r1 < 2.0);
            prop_assert!(m.r0 > 0.0 && m.r0 < m.eps);
            prop_assert!(m.r0 < m.r1);
            let root = pow(eps, 1.0 / m.p);
            let left = root * m.r1;
            let right = m.c0 * root * pow(2.0 - m.r1, m.lambda);
            prop_assert!((left - right).abs() <= 1e-10 * left);
        }
    }
}
