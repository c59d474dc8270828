//! Relaxation-time kinetics in a uniform field along z and the noise it
//! induces.
//!
//! The carriers are electrons (negative charge), so with `E > 0` the
//! distribution drifts toward `-z`. `e_charge` holds the magnitude `|e|`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distribution::{FieldAxis, MomentumDistribution};
use crate::error::{Error, Result};
use crate::observation::ObservationGeometry;
use crate::quad::{self, Tolerance};
use crate::spectrum::{SpectrumEvaluator, SpectrumMethod, SpectrumResult};

/// Exponential window (in units of `q0`) kept in the `xi` integral.
const XI_WINDOW: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticParams {
    pub m_star: f64,
    pub tau: f64,
    /// Field strength along z.
    pub field: f64,
    /// Charge magnitude `|e|`.
    pub e_charge: f64,
    pub q_f: f64,
    pub rho0_at_zero: f64,
}

impl KineticParams {
    /// Unit mass, time and charge with the field chosen so that `q0` comes
    /// out as given.
    pub fn with_q0(q0: f64, q_f: f64, rho0_at_zero: f64) -> Self {
        Self {
            m_star: 1.0,
            tau: 1.0,
            field: q0,
            e_charge: 1.0,
            q_f,
            rho0_at_zero,
        }
    }

    /// Degenerate gas of density `n` (two spin states): `rho_0(0) = 2/n`
    /// and `q_F = (3 pi^2 n)^{1/3}`.
    pub fn degenerate(n: f64, m_star: f64, tau: f64, field: f64, e_charge: f64) -> Self {
        Self {
            m_star,
            tau,
            field,
            e_charge,
            q_f: (3.0 * PI * PI * n).cbrt(),
            rho0_at_zero: 2.0 / n,
        }
    }

    /// `q0 = |e| |E| tau`.
    pub fn q0(&self) -> f64 {
        self.e_charge.abs() * self.field.abs() * self.tau
    }

    /// Direction the distribution is shifted away from (the field axis).
    pub fn axis(&self) -> FieldAxis {
        if self.field >= 0.0 {
            FieldAxis::PlusZ
        } else {
            FieldAxis::MinusZ
        }
    }

    /// The weak-field closed form is trusted for `q0 < q_F`.
    pub fn within_validity(&self) -> bool {
        self.q0() < self.q_f
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_star", self.m_star),
            ("tau", self.tau),
            ("e_charge", self.e_charge),
            ("q_f", self.q_f),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.field.is_finite() {
            return Err(Error::InvalidParameter("field must be finite".into()));
        }
        if !(self.rho0_at_zero.is_finite() && self.rho0_at_zero >= 0.0) {
            return Err(Error::InvalidParameter("rho0_at_zero must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InducedNoiseResult {
    pub delta_k: f64,
    pub delta_k_closed: f64,
    /// `|Delta C_00|` from the closed form.
    pub delta_c00: f64,
    /// `|Delta C_00| / C_00(0)`.
    pub relative_to_zero_field: f64,
    /// False when `q0 >= q_F`.
    pub within_validity: bool,
}

/// Closed-form value together with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedDeltaK {
    pub value: f64,
    pub within_validity: bool,
}

/// The field-distorted density as a [`MomentumDistribution`].
pub fn kinetic_distribution(d0: &MomentumDistribution, kp: &KineticParams) -> Result<MomentumDistribution> {
    kp.validate()?;
    MomentumDistribution::kinetic_shifted(d0.clone(), kp.q0(), kp.axis())
}

/// `rho(q_perp, q_z) = (e^{q_z/q0}/q0) int_{q_z}^inf e^{-xi/q0} rho_0(q_perp^2 + xi^2) d xi`.
pub fn kinetic_solution(d0: &MomentumDistribution, kp: &KineticParams, q_perp: f64, q_z: f64) -> Result<f64> {
    let d = kinetic_distribution(d0, kp)?;
    let v = d.density_cyl(q_perp, q_z);
    if !v.is_finite() {
        return Err(Error::NonIntegrable(format!("xi integral failed at ({q_perp}, {q_z})")));
    }
    Ok(v)
}

/// `e E d rho / d q_z + (rho - rho_0) / tau` at one point, with the
/// derivative from a five-point stencil of step `h`.
pub fn keq_residual(d0: &MomentumDistribution, kp: &KineticParams, q_perp: f64, q_z: f64, h: f64) -> Result<f64> {
    let d = kinetic_distribution(d0, kp)?;
    let f = |z: f64| d.density_cyl(q_perp, z);
    let deriv = (f(q_z - 2.0 * h) - 8.0 * f(q_z - h) + 8.0 * f(q_z + h) - f(q_z + 2.0 * h)) / (12.0 * h);
    let rho0 = d0.radial(q_perp.hypot(q_z));
    let force = -kp.e_charge.abs() * kp.field;
    Ok(force * deriv + (f(q_z) - rho0) / kp.tau)
}

/// `Delta K = -pi sin^2 chi int_0^inf xi e^{-xi/q0} rho_0(xi sin chi) d xi`.
pub fn delta_k_exact(d0: &MomentumDistribution, kp: &KineticParams, chi: f64) -> Result<f64> {
    kp.validate()?;
    if !(0.0..=0.5 * PI + 1e-12).contains(&chi) {
        return Err(Error::Domain(format!("chi must lie in [0, pi/2], got {chi}")));
    }
    if !d0.is_isotropic() {
        return Err(Error::NotIsotropic(d0.anisotropy(Tolerance::default())?));
    }
    let q0 = kp.q0();
    let s = chi.sin();
    if q0 == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let end = XI_WINDOW * q0;
    let mut pts: Vec<f64> = d0
        .radial_breaks(0.5 * PI)
        .into_iter()
        .map(|b| b / s)
        .filter(|b| *b < end)
        .collect();
    pts.push(end);
    let e = quad::integrate_with_breaks(
        |xi| xi * (-xi / q0).exp() * d0.radial(xi * s),
        &pts,
        Tolerance::new(1e-300, 1e-10),
    )?;
    Ok(-PI * s * s * e.value)
}

/// `Delta K = -q0^2 rho_0(0) pi sin^2 chi`, dropping terms of order
/// `exp(-q_F sin chi / q0)`.
pub fn delta_k_closed(kp: &KineticParams, chi: f64, rho0_at_zero: f64) -> ClosedDeltaK {
    let q0 = kp.q0();
    ClosedDeltaK {
        value: -q0 * q0 * rho0_at_zero * PI * chi.sin().powi(2),
        within_validity: kp.within_validity(),
    }
}

/// Size of the neglected exponential terms, `3 exp(-q_F sin chi / q0)`.
pub fn exponential_allowance(kp: &KineticParams, chi: f64) -> f64 {
    let q0 = kp.q0();
    if q0 == 0.0 {
        return 0.0;
    }
    3.0 * (-kp.q_f * chi.sin() / q0).exp()
}

/// Zero-field `C_00(0) = e^2 / (32 pi^4 r^2 r' |omega|) int q rho_0 dq`.
pub fn zero_field_c00_reference(
    d0: &MomentumDistribution,
    g: &ObservationGeometry,
    omega: f64,
    e_charge: f64,
    mass: f64,
) -> Result<SpectrumResult> {
    let ev = SpectrumEvaluator::new(d0.clone(), mass)?;
    let s = ev.spherical_i23(g.r(), omega)?;
    let factor = e_charge * e_charge / (4.0 * PI * g.r_prime());
    Ok(SpectrumResult {
        magnitude: s.magnitude * factor,
        regime: ev.regime(g.r().min(g.r_prime()), omega),
        quadrature_error: s.quadrature_error * factor,
        method: SpectrumMethod::SphericalI23,
    })
}

/// Field-induced `|Delta C_00| = e^2 q0^2 rho_0(0) zeta^2 / (32 pi^4 r^4 r' |omega|)`
/// with the exact and closed `Delta K` and the ratio to the zero-field value.
pub fn induced_c00(
    d0: &MomentumDistribution,
    kp: &KineticParams,
    g: &ObservationGeometry,
    omega: f64,
    e_charge: f64,
) -> Result<InducedNoiseResult> {
    kp.validate()?;
    let chi = g.chi();
    let delta_k = delta_k_exact(d0, kp, chi)?;
    let closed = delta_k_closed(kp, chi, kp.rho0_at_zero);
    let (r, rp, zeta) = (g.r(), g.r_prime(), g.zeta());
    let q0 = kp.q0();
    let delta_c00 = e_charge * e_charge * q0 * q0 * kp.rho0_at_zero * zeta * zeta
        / (32.0 * PI.powi(4) * r.powi(4) * rp * omega.abs());
    let c0 = zero_field_c00_reference(d0, g, omega, e_charge, kp.m_star)?;
    Ok(InducedNoiseResult {
        delta_k,
        delta_k_closed: closed.value,
        delta_c00,
        relative_to_zero_field: delta_c00 / c0.magnitude,
        within_validity: closed.within_validity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> MomentumDistribution {
        MomentumDistribution::fermi_step(1.0).unwrap()
    }

    fn params(q0: f64) -> KineticParams {
        KineticParams::with_q0(q0, 1.0, step().value_at_zero())
    }

    #[test]
    fn q0_is_charge_field_tau() {
        let kp = KineticParams::degenerate(0.3, 2.0, 1.5, 0.02, 0.7);
        assert!((kp.q0() - 0.7 * 0.02 * 1.5).abs() < 1e-15);
        assert!((kp.rho0_at_zero - 2.0 / 0.3).abs() < 1e-14);
        let step = MomentumDistribution::fermi_step(kp.q_f).unwrap();
        assert!(((step.value_at_zero() - kp.rho0_at_zero) / kp.rho0_at_zero).abs() < 1e-12);
    }

    #[test]
    fn zero_field_gives_zero_delta_k() {
        let kp = params(0.0);
        assert_eq!(delta_k_exact(&step(), &kp, 1.0).unwrap(), 0.0);
        assert_eq!(delta_k_closed(&kp, 1.0, kp.rho0_at_zero).value, 0.0);
    }

    #[test]
    fn delta_k_vanishes_along_transverse_plane() {
        assert_eq!(delta_k_exact(&step(), &params(0.1), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn doubling_field_quadruples_closed_form() {
        let a = delta_k_closed(&params(0.01), 0.8, 2.0).value;
        let b = delta_k_closed(&params(0.02), 0.8, 2.0).value;
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn validity_flag_trips_at_fermi_momentum() {
        assert!(delta_k_closed(&params(0.5), 1.0, 1.0).within_validity);
        assert!(!delta_k_closed(&params(1.0), 1.0, 1.0).within_validity);
    }

    #[test]
    fn transverse_observation_has_no_induced_noise() {
        let g = ObservationGeometry::from_polar(100.0, 0.0, 100.0).unwrap();
        let r = induced_c00(&step(), &params(0.05), &g, 1e-6, 0.3).unwrap();
        assert_eq!(r.delta_c00, 0.0);
    }

    #[test]
    fn negative_field_mirrors_solution() {
        let mut kp = params(0.1);
        let up = kinetic_solution(&step(), &kp, 0.2, 0.5).unwrap();
        kp.field = -kp.field;
        let down = kinetic_solution(&step(), &kp, 0.2, -0.5).unwrap();
        assert_eq!(up, down);
    }
}
