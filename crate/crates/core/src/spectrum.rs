//! Disconnected-part power spectrum of the Coulomb potential of one
//! electron: the exact transform |I~(rho, zeta, omega)|, its low-frequency
//! long-range asymptote, the spherical reduction, and the single-electron
//! correlation |C_00|.
//!
//! All magnitudes drop the pure phase `exp(i omega (t0 - t'))`.
//!
//! The angular integrals share the weight `sin(theta) / sqrt(sin^2 theta -
//! sin^2 chi)` on `[chi, pi - chi]`. With `cos(theta) = cos(chi) sin(phi)`
//! it becomes `d phi` on `[-pi/2, pi/2]`, so no quadrature node ever sees
//! the endpoint singularity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distribution::{momentum_variance, DistributionKind, MomentumDistribution};
use crate::error::{Error, Result};
use crate::observation::{ObservationGeometry, RegimeFlags, RegimeThresholds};
use crate::quad::{self, Estimate, GaussLegendre, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMethod {
    ExactI2,
    AsymptoticI22,
    SphericalI23,
}

impl SpectrumMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumMethod::ExactI2 => "exact_i2",
            SpectrumMethod::AsymptoticI22 => "asymptotic_i22",
            SpectrumMethod::SphericalI23 => "spherical_i23",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub magnitude: f64,
    pub regime: RegimeFlags,
    pub quadrature_error: f64,
    pub method: SpectrumMethod,
}

/// `int_{chi}^{pi-chi} d theta sin(theta)/sqrt(sin^2 theta - sin^2 chi) f(theta)`
/// evaluated on the regular `phi` form.
pub fn angular_integral<F>(sin_chi: f64, mut f: F, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let sin_chi = sin_chi.abs();
    if sin_chi > 1.0 {
        return Err(Error::Domain(format!("|sin chi| = {sin_chi} exceeds 1")));
    }
    let cos_chi = (1.0 - sin_chi * sin_chi).sqrt();
    let half = 0.5 * PI;
    quad::integrate_with_breaks(
        |phi| {
            let u = (cos_chi * phi.sin()).clamp(-1.0, 1.0);
            f(u.acos())
        },
        &[-half, 0.0, half],
        tol,
    )
}

/// Tail integral `Gamma(q, theta) = (1/2 pi^2) int_q^inf w rho(w, theta) dw`
/// and its derivative.
#[derive(Debug, Clone)]
pub struct GammaFunctionTable<'a> {
    source: &'a MomentumDistribution,
    tol: Tolerance,
}

impl<'a> GammaFunctionTable<'a> {
    pub fn new(source: &'a MomentumDistribution) -> Self {
        Self {
            source,
            tol: Tolerance::new(1e-300, 1e-12),
        }
    }

    pub fn source(&self) -> &MomentumDistribution {
        self.source
    }

    /// `(Gamma, dGamma/dq)` at `(q, theta)`.
    pub fn gamma(&self, q: f64, theta: f64) -> Result<(f64, f64)> {
        if q < 0.0 {
            return Err(Error::Domain(format!("q must be nonnegative, got {q}")));
        }
        let d = self.source;
        let deriv = -q * d.density(q, theta) / (2.0 * PI * PI);
        let breaks = d.radial_breaks(theta);
        let top = *breaks.last().unwrap();
        let closed = match d.kind() {
            DistributionKind::FermiStep { .. } => {
                // the radial extent already includes any cutoff
                let qf = top;
                Some(d.amplitude() / (4.0 * PI * PI) * (qf * qf - q * q).max(0.0))
            }
            DistributionKind::GaussianIsotropic { sigma } => {
                let tail = |x: f64| (-0.5 * (x / sigma).powi(2)).exp();
                Some(if q >= top {
                    0.0
                } else {
                    d.amplitude() * sigma * sigma / (2.0 * PI * PI) * (tail(q) - tail(top))
                })
            }
            _ => None,
        };
        if let Some(g) = closed {
            return Ok((g, deriv));
        }
        let mut pts: Vec<f64> = vec![q];
        pts.extend(breaks.into_iter().filter(|b| *b > q));
        let e = quad::integrate_with_breaks(|w| w * d.density(w, theta), &pts, self.tol)?;
        Ok((e.value / (2.0 * PI * PI), deriv))
    }
}

/// Spectrum evaluator for one momentum density and particle mass.
#[derive(Debug, Clone)]
pub struct SpectrumEvaluator {
    dist: MomentumDistribution,
    mass: f64,
    dtilde: f64,
    pub tolerance: Tolerance,
    pub thresholds: RegimeThresholds,
    /// Gauss order of the low rule on each oscillation panel (the high rule
    /// doubles it).
    pub panel_order: usize,
}

impl SpectrumEvaluator {
    pub fn new(dist: MomentumDistribution, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let dtilde = momentum_variance(&dist)?;
        Ok(Self {
            dist,
            mass,
            dtilde,
            tolerance: Tolerance::default(),
            thresholds: RegimeThresholds::default(),
            panel_order: 10,
        })
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_thresholds(mut self, th: RegimeThresholds) -> Self {
        self.thresholds = th;
        self
    }

    pub fn distribution(&self) -> &MomentumDistribution {
        &self.dist
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// rms momentum D~ of the density.
    pub fn dtilde(&self) -> f64 {
        self.dtilde
    }

    /// `omega0 = D~ / (m r)`.
    pub fn omega0(&self, r: f64) -> f64 {
        self.dtilde / (self.mass * r)
    }

    pub fn regime(&self, r: f64, omega: f64) -> RegimeFlags {
        RegimeFlags::evaluate(self.dtilde, r, omega, self.mass, self.thresholds)
    }

    fn check_inputs(r: f64, omega: f64) -> Result<()> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!("r must be positive, got {r}")));
        }
        if !(omega.is_finite() && omega != 0.0) {
            return Err(Error::Domain(format!("omega must be finite and nonzero, got {omega}")));
        }
        Ok(())
    }

    /// `int_0^inf q rho(q, theta) dq`.
    fn q_moment(&self, theta: f64) -> f64 {
        self.dist
            .radial_moment(1, theta, Tolerance::new(1e-300, self.tolerance.rel.min(1e-11)))
            .unwrap_or(f64::NAN)
    }

    /// The angular-momentum integral
    /// `int d theta sin/sqrt(...) int_0^inf dq q rho(q, theta)` shared by the
    /// asymptote and |C_00|.
    pub fn angular_q_integral(&self, sin_chi: f64) -> Result<Estimate> {
        let tol = Tolerance::new(1e-300, self.tolerance.rel.min(1e-11));
        let e = if self.dist.is_isotropic() {
            let f = self.q_moment(0.5 * PI);
            angular_integral(sin_chi, |_| f, tol)?
        } else {
            angular_integral(sin_chi, |theta| self.q_moment(theta), tol)?
        };
        if !e.value.is_finite() {
            return Err(Error::NonIntegrable("radial moment did not converge".into()));
        }
        Ok(e)
    }

    /// Exact transform: `|I~| = |1/(2 pi^2 r omega) int d theta sin/sqrt(...)
    /// int dq sin(r sqrt(q^2 + 2 m omega)) {2 Gamma cos(qr) + Gamma' sin(qr) / r}|`.
    pub fn exact_i2(&self, g: &ObservationGeometry, omega: f64) -> Result<SpectrumResult> {
        let r = g.r();
        Self::check_inputs(r, omega)?;
        let omega = omega.abs();
        let a2 = 2.0 * self.mass * omega;
        let mut inner_err: f64 = 0.0;
        let mut failure = None;
        let mut inner = |theta: f64| -> f64 {
            match self.bracket_integral(theta, r, a2) {
                Ok(e) => {
                    inner_err = inner_err.max(e.error);
                    e.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let outer_tol = Tolerance::new(self.tolerance.abs * 1e-3, self.tolerance.rel * 1e-2);
        let outer = if self.dist.is_isotropic() {
            let v = inner(0.5 * PI);
            angular_integral(g.sin_chi(), |_| v, outer_tol)?
        } else {
            angular_integral(g.sin_chi(), inner, outer_tol)?
        };
        if let Some(e) = failure {
            return Err(e);
        }
        let pref = 1.0 / (2.0 * PI * PI * r * omega);
        let magnitude = (outer.value * pref).abs();
        let quadrature_error = (outer.error + PI * inner_err) * pref;
        let target = self.tolerance.target(magnitude);
        if !(quadrature_error <= target) {
            return Err(Error::QuadratureFailure {
                error: quadrature_error,
                tolerance: target,
            });
        }
        Ok(SpectrumResult {
            magnitude,
            regime: self.regime(r, omega),
            quadrature_error,
            method: SpectrumMethod::ExactI2,
        })
    }

    /// Radial bracket integral of the exact transform along `theta`.
    ///
    /// Panels are at most a quarter period of `sin(q r)` wide. Gamma is built
    /// panel by panel from the top of the support down, so every node sees
    /// the exact tail integral of its own panel.
    fn bracket_integral(&self, theta: f64, r: f64, a2: f64) -> Result<Estimate> {
        let mut breaks = self.dist.radial_breaks(theta);
        let width = 0.25 * PI / r;
        // sqrt(q^2 + a^2) has branch points at +-i a; grade panels toward 0
        let a = a2.sqrt();
        let top = *breaks.last().unwrap();
        let mut g = 0.25 * a;
        while g < width.min(top) {
            breaks.push(g);
            g *= 2.0;
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut panels = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let n = ((b - a) / width).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            for k in 0..n {
                let pa = a + h * k as f64;
                let pb = if k + 1 == n { b } else { pa + h };
                panels.push((pa, pb));
            }
        }
        let d = &self.dist;
        let wrho = |w: f64| w * d.density(w, theta) / (2.0 * PI * PI);
        let closed = GammaFunctionTable::new(d);
        let use_closed = matches!(
            d.kind(),
            DistributionKind::FermiStep { .. } | DistributionKind::GaussianIsotropic { .. }
        );
        let ctx = PanelContext {
            low: GaussLegendre::new(self.panel_order),
            high: GaussLegendre::new(2 * self.panel_order),
            tail_low: GaussLegendre::new(8),
            tail_high: GaussLegendre::new(16),
            wrho: &wrho,
            closed: if use_closed { Some((&closed, theta)) } else { None },
            r,
            a2,
            budget: 0.0,
        };
        // the integrand is bounded by about 2 Gamma(0)
        let gamma0: f64 = panels
            .iter()
            .map(|&(pa, pb)| ctx.tail_high.integrate(&wrho, pa, pb))
            .sum();
        let ctx = PanelContext {
            budget: self.tolerance.rel * 1e-2 * 2.0 * gamma0.abs(),
            ..ctx
        };

        let mut gamma_top = 0.0;
        // from the top panel downward so Gamma accumulates
        let mut contributions = Vec::with_capacity(panels.len());
        for &(pa, pb) in panels.iter().rev() {
            let p = ctx.panel(pa, pb, gamma_top, 0);
            contributions.push((p.value, p.error));
            gamma_top = p.gamma_bottom;
        }
        let mut value = 0.0;
        let mut error = 0.0;
        for (v, e) in contributions.into_iter().rev() {
            value += v;
            error += e;
        }
        if !value.is_finite() {
            return Err(Error::NonIntegrable("bracket integrand is not finite".into()));
        }
        Ok(Estimate { value, error })
    }

    /// Low-frequency long-range asymptote
    /// `|I~| = A(chi) / (8 pi^4 r^2 |omega|)`.
    pub fn asymptotic_i22(&self, g: &ObservationGeometry, omega: f64) -> Result<SpectrumResult> {
        let r = g.r();
        Self::check_inputs(r, omega)?;
        let a = self.angular_q_integral(g.sin_chi())?;
        let pref = 1.0 / (8.0 * PI.powi(4) * r * r * omega.abs());
        Ok(SpectrumResult {
            magnitude: a.value.abs() * pref,
            regime: self.regime(r, omega),
            quadrature_error: a.error * pref,
            method: SpectrumMethod::AsymptoticI22,
        })
    }

    /// Spherical reduction `|I~| = int q rho dq / (8 pi^3 r^2 |omega|)`.
    pub fn spherical_i23(&self, r: f64, omega: f64) -> Result<SpectrumResult> {
        Self::check_inputs(r, omega)?;
        let spread = self.dist.anisotropy(Tolerance::new(1e-300, 1e-12))?;
        if spread > 1e-10 {
            return Err(Error::NotIsotropic(spread));
        }
        let f = self.q_moment(0.5 * PI);
        if !f.is_finite() {
            return Err(Error::NonIntegrable("radial moment did not converge".into()));
        }
        let pref = 1.0 / (8.0 * PI.powi(3) * r * r * omega.abs());
        Ok(SpectrumResult {
            magnitude: f.abs() * pref,
            regime: self.regime(r, omega),
            quadrature_error: f.abs() * 1e-12 * pref,
            method: SpectrumMethod::SphericalI23,
        })
    }

    /// Single-electron `|C_00| = e^2 A(chi) / (32 pi^5 r^2 r' |omega|)`.
    pub fn c00_single_electron(&self, g: &ObservationGeometry, omega: f64, e_charge: f64) -> Result<SpectrumResult> {
        let r = g.r();
        let rp = g.r_prime();
        Self::check_inputs(r, omega)?;
        let a = self.angular_q_integral(g.sin_chi())?;
        let pref = e_charge * e_charge / (32.0 * PI.powi(5) * r * r * rp * omega.abs());
        Ok(SpectrumResult {
            magnitude: a.value.abs() * pref,
            regime: self.regime(r.min(rp), omega),
            quadrature_error: a.error * pref,
            method: SpectrumMethod::AsymptoticI22,
        })
    }

    /// Magnitude of the time Fourier transform of the mean potential at `x`:
    /// `e |I~|` (the 4-velocity factor `q_0 / epsilon_q` is 1 at leading order).
    pub fn mean_field_transform(&self, g: &ObservationGeometry, omega: f64, e_charge: f64) -> Result<f64> {
        Ok(e_charge.abs() * self.asymptotic_i22(g, omega)?.magnitude)
    }
}

/// Fixed-order Gauss panels of the bracket integrand, bisected while the
/// order-doubling discrepancy exceeds the per-length budget.
struct PanelContext<'a, W: Fn(f64) -> f64> {
    low: GaussLegendre,
    high: GaussLegendre,
    tail_low: GaussLegendre,
    tail_high: GaussLegendre,
    /// `q rho(q, theta) / (2 pi^2)`, i.e. `-dGamma/dq`.
    wrho: &'a W,
    closed: Option<(&'a GammaFunctionTable<'a>, f64)>,
    r: f64,
    a2: f64,
    /// Allowed error per unit of `q`.
    budget: f64,
}

struct Panel {
    value: f64,
    error: f64,
    gamma_bottom: f64,
}

const MAX_PANEL_DEPTH: u32 = 40;

impl<W: Fn(f64) -> f64> PanelContext<'_, W> {
    fn panel(&self, pa: f64, pb: f64, gamma_top: f64, depth: u32) -> Panel {
        let wrho = self.wrho;
        let (gamma_bottom, tail_err) = match self.closed {
            Some((t, theta)) => (t.gamma(pa, theta).map(|g| g.0).unwrap_or(f64::NAN), 0.0),
            None => {
                let hi = self.tail_high.integrate(wrho, pa, pb);
                let lo = self.tail_low.integrate(wrho, pa, pb);
                (gamma_top + hi, (hi - lo).abs())
            }
        };
        let integrand = |q: f64| -> f64 {
            let gamma = match self.closed {
                Some((t, theta)) => t.gamma(q, theta).map(|g| g.0).unwrap_or(f64::NAN),
                None => gamma_top + self.tail_high.integrate(wrho, q, pb),
            };
            let (sq, cq) = (q * self.r).sin_cos();
            (self.r * (q * q + self.a2).sqrt()).sin() * (2.0 * gamma * cq - wrho(q) * sq / self.r)
        };
        let lo = self.low.integrate(integrand, pa, pb);
        let hi = self.high.integrate(integrand, pa, pb);
        let error = (hi - lo).abs() + 2.0 * tail_err * (pb - pa);
        if error > self.budget * (pb - pa) && depth < MAX_PANEL_DEPTH {
            let mid = 0.5 * (pa + pb);
            let right = self.panel(mid, pb, gamma_top, depth + 1);
            let left = self.panel(pa, mid, right.gamma_bottom, depth + 1);
            return Panel {
                value: left.value + right.value,
                error: left.error + right.error,
                gamma_bottom: left.gamma_bottom,
            };
        }
        Panel {
            value: hi,
            error,
            gamma_bottom,
        }
    }
}

/// Static Coulomb mean field `e / (4 pi r)`.
pub fn coulomb_mean_field(e_charge: f64, r: f64) -> f64 {
    e_charge.abs() / (4.0 * PI * r)
}
