//! Observation points relative to an electron's mean position, and the
//! validity flags of the low-frequency, long-range regime.

use serde::{Deserialize, Serialize};

use crate::distribution::{momentum_variance, MomentumDistribution};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Two observation points `x`, `x'` and the electron's mean position `x0`.
/// The field (symmetry) axis is z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationGeometry {
    pub x: Vec3,
    pub x_prime: Vec3,
    pub x0: Vec3,
}

impl ObservationGeometry {
    pub fn new(x: Vec3, x_prime: Vec3, x0: Vec3) -> Result<Self> {
        let g = Self { x, x_prime, x0 };
        if !(g.r() > 0.0 && g.r_prime() > 0.0) {
            return Err(Error::Domain(
                "observation points must differ from the electron position".into(),
            ));
        }
        if [x, x_prime, x0].iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        Ok(g)
    }

    /// Geometry with `x0` at the origin, `x` at distance `r` making angle
    /// `chi` with the transverse plane, and `x'` at distance `r_prime` on the
    /// transverse axis.
    pub fn from_polar(r: f64, chi: f64, r_prime: f64) -> Result<Self> {
        let (s, c) = chi.sin_cos();
        Self::new([r * c, 0.0, r * s], [r_prime, 0.0, 0.0], [0.0; 3])
    }

    pub fn r(&self) -> f64 {
        norm(sub(self.x, self.x0))
    }

    pub fn r_prime(&self) -> f64 {
        norm(sub(self.x_prime, self.x0))
    }

    pub fn zeta(&self) -> f64 {
        self.x[2] - self.x0[2]
    }

    pub fn zeta_prime(&self) -> f64 {
        self.x_prime[2] - self.x0[2]
    }

    pub fn rho_perp(&self) -> f64 {
        let d = sub(self.x, self.x0);
        d[0].hypot(d[1])
    }

    /// `sin chi = |zeta| / r`.
    pub fn sin_chi(&self) -> f64 {
        (self.zeta().abs() / self.r()).min(1.0)
    }

    /// Angle between `x - x0` and the transverse plane, in `[0, pi/2]`.
    pub fn chi(&self) -> f64 {
        self.zeta().abs().atan2(self.rho_perp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeThresholds {
    /// `omega / omega0` must stay below this.
    pub eps1: f64,
    /// `r * D~` must exceed this.
    pub eps2: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { eps1: 1e-2, eps2: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeFlags {
    pub cond1_ok: bool,
    pub cond2_ok: bool,
    pub omega0: f64,
    pub r_dtilde: f64,
}

impl RegimeFlags {
    /// Flags for a density with rms momentum `dtilde`, distance `r`,
    /// frequency `omega` and mass `mass` (natural units).
    pub fn evaluate(dtilde: f64, r: f64, omega: f64, mass: f64, th: RegimeThresholds) -> Self {
        let omega0 = dtilde / (mass * r);
        let r_dtilde = r * dtilde;
        Self {
            cond1_ok: omega.abs() / omega0 < th.eps1,
            cond2_ok: r_dtilde > th.eps2,
            omega0,
            r_dtilde,
        }
    }

    pub fn asymptotic(&self) -> bool {
        self.cond1_ok && self.cond2_ok
    }
}

/// Evaluates the two validity conditions of the long-range low-frequency
/// asymptote. The distance used is the smaller of `r` and `r'`.
pub fn check_regime(
    d: &MomentumDistribution,
    g: &ObservationGeometry,
    omega: f64,
    mass: f64,
    th: RegimeThresholds,
) -> Result<RegimeFlags> {
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    let dtilde = momentum_variance(d)?;
    Ok(RegimeFlags::evaluate(dtilde, g.r().min(g.r_prime()), omega, mass, th))
}
