use invlab_core::map::{AngleCurve, AxisymmetricMap, Identity, LocalT, Partials, Patch, RegionLabel, ReflectZ};
use invlab_core::mapfamily::{make_params, FamilyMap, LimitMap, DOMAIN_RADIUS};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Map selectable from configs and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Family,
    Limit,
    Identity,
    Reflect,
}

/// One of the concrete maps behind a single type.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMap {
    Family(FamilyMap),
    Limit(LimitMap),
    Identity(Identity),
    Reflect(ReflectZ),
    /// The inner map followed by `z -> -z`, which flips the sign of the
    /// Jacobian. Used to check that degree tests catch orientation errors.
    Mirrored(Box<AnyMap>),
}

impl AnyMap {
    /// Builds the map named by `kind`. The family needs `eps`; the family
    /// and the limit take the exponent `a` and an optional `p`.
    pub fn build(kind: MapKind, eps: Option<f64>, a: f64, p: Option<f64>) -> Result<AnyMap> {
        Ok(match kind {
            MapKind::Family => {
                let eps = eps.ok_or_else(|| CliError::Config("map `family` requires `eps`".into()))?;
                AnyMap::Family(FamilyMap::new(make_params(eps, a, p)?))
            }
            MapKind::Limit => {
                // any admissible eps yields the same p for the given a
                let params = make_params(0.1, a, p)?;
                AnyMap::Limit(LimitMap::new(params.p))
            }
            MapKind::Identity => AnyMap::Identity(Identity { radius: DOMAIN_RADIUS }),
            MapKind::Reflect => AnyMap::Reflect(ReflectZ { radius: DOMAIN_RADIUS }),
        })
    }

    pub fn family(eps: f64) -> Result<AnyMap> {
        AnyMap::family_with(eps, 1.0, None)
    }

    pub fn family_with(eps: f64, a: f64, p: Option<f64>) -> Result<AnyMap> {
        AnyMap::build(MapKind::Family, Some(eps), a, p)
    }

    pub fn mirrored(self) -> AnyMap {
        AnyMap::Mirrored(Box::new(self))
    }

    fn inner(&self) -> &dyn AxisymmetricMap {
        match self {
            AnyMap::Family(m) => m,
            AnyMap::Limit(m) => m,
            AnyMap::Identity(m) => m,
            AnyMap::Reflect(m) => m,
            AnyMap::Mirrored(m) => m.as_ref(),
        }
    }
}

fn mirror(p: Partials) -> Partials {
    Partials {
        alpha_img: std::f64::consts::PI - p.alpha_img,
        d_ar: -p.d_ar,
        d_aa: -p.d_aa,
        det: -p.det,
        ..p
    }
}

impl AxisymmetricMap for AnyMap {
    fn domain_radius(&self) -> f64 {
        self.inner().domain_radius()
    }

    fn image(&self, r: f64, alpha: f64) -> invlab_core::Result<(f64, f64)> {
        let (ri, ai) = self.inner().image(r, alpha)?;
        Ok(match self {
            AnyMap::Mirrored(_) => (ri, std::f64::consts::PI - ai),
            _ => (ri, ai),
        })
    }

    fn classify(&self, r: f64, alpha: f64) -> RegionLabel {
        self.inner().classify(r, alpha)
    }

    fn analytic_partials(&self, r: f64, alpha: f64) -> invlab_core::Result<Partials> {
        let p = self.inner().analytic_partials(r, alpha)?;
        Ok(match self {
            AnyMap::Mirrored(_) => mirror(p),
            _ => p,
        })
    }

    fn patches(&self) -> Vec<Patch> {
        self.inner().patches()
    }

    fn curve(&self, c: AngleCurve, r: f64) -> f64 {
        self.inner().curve(c, r)
    }

    fn local_partials(&self, patch: &Patch, r: f64, t: LocalT, lo: f64, hi: f64) -> invlab_core::Result<(f64, Partials)> {
        let (alpha, p) = self.inner().local_partials(patch, r, t, lo, hi)?;
        Ok(match self {
            AnyMap::Mirrored(_) => (alpha, mirror(p)),
            _ => (alpha, p),
        })
    }
}
