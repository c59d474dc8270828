//! Axially symmetric momentum-space densities rho(q, theta).
//!
//! Densities are normalized with the measure d^3q / (2 pi)^3 and depend only
//! on the modulus `q` and the polar angle `theta` measured from the field
//! axis (z). The isotropic families double as equilibrium densities
//! rho_0(epsilon) with epsilon = q^2 / 2m*; `KineticShifted` is the
//! relaxation-time solution in a uniform field built on top of one of them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Relative density level below which tails are truncated.
const TAIL_DECADES: f64 = 37.0; // ln(1e16)

/// Exponential windows longer than this many q0 contribute below 1e-21.
const KINETIC_WINDOW: f64 = 50.0;

const INNER_TOL: Tolerance = Tolerance::new(1e-300, 1e-13);

/// Direction of the applied field along the symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldAxis {
    #[default]
    PlusZ,
    MinusZ,
}

/// Config-facing description of a distribution: a kind tag plus numeric
/// parameters. Building one always yields a normalized density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    GaussianIsotropic {
        sigma: f64,
    },
    FermiStep {
        q_f: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    FermiSmeared {
        q_f: f64,
        width: f64,
    },
    KineticShifted {
        base: Box<DistributionSpec>,
        q0: f64,
        #[serde(default)]
        axis: FieldAxis,
    },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<MomentumDistribution> {
        match self {
            DistributionSpec::GaussianIsotropic { sigma } => MomentumDistribution::gaussian_isotropic(*sigma),
            DistributionSpec::FermiStep { q_f, cutoff } => {
                let d = MomentumDistribution::fermi_step(*q_f)?;
                match cutoff {
                    Some(c) => Ok(normalize_distribution(&d.with_cutoff(*c)?)?.0),
                    None => Ok(d),
                }
            }
            DistributionSpec::FermiSmeared { q_f, width } => MomentumDistribution::fermi_smeared(*q_f, *width),
            DistributionSpec::KineticShifted { base, q0, axis } => {
                MomentumDistribution::kinetic_shifted(base.build()?, *q0, *axis)
            }
        }
    }

    /// Parameter checks without building anything; returns every problem.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let positive = |name: &str, v: f64, errs: &mut Vec<String>| {
            if !(v.is_finite() && v > 0.0) {
                errs.push(format!("distribution.{name} must be positive and finite, got {v}"));
            }
        };
        match self {
            DistributionSpec::GaussianIsotropic { sigma } => positive("sigma", *sigma, &mut errs),
            DistributionSpec::FermiStep { q_f, cutoff } => {
                positive("q_f", *q_f, &mut errs);
                if let Some(c) = cutoff {
                    positive("cutoff", *c, &mut errs);
                }
            }
            DistributionSpec::FermiSmeared { q_f, width } => {
                positive("q_f", *q_f, &mut errs);
                positive("width", *width, &mut errs);
            }
            DistributionSpec::KineticShifted { base, q0, .. } => {
                positive("q0", *q0, &mut errs);
                if matches!(**base, DistributionSpec::KineticShifted { .. }) {
                    errs.push("distribution.base must be an isotropic equilibrium density".into());
                }
                errs.extend(base.validate());
            }
        }
        errs
    }
}

/// Tabulated density on a (q, theta) grid with bilinear interpolation.
/// Zero outside the q range.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    q: Vec<f64>,
    theta: Vec<f64>,
    /// Row-major: `values[i * theta.len() + j]` at `(q[i], theta[j])`.
    values: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(q: Vec<f64>, theta: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if q.len() < 2 || theta.len() < 2 || !sorted(&q) || !sorted(&theta) {
            return Err(Error::InvalidParameter(
                "tabulated grid needs at least two strictly increasing nodes per axis".into(),
            ));
        }
        if q[0] < 0.0 || theta[0] > 0.0 || *theta.last().unwrap() < PI {
            return Err(Error::InvalidParameter(
                "tabulated grid must have q >= 0 and cover theta in [0, pi]".into(),
            ));
        }
        if values.len() != q.len() * theta.len() || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "tabulated values must be finite, nonnegative and match the grid size".into(),
            ));
        }
        Ok(Self { q, theta, values })
    }

    fn locate(grid: &[f64], x: f64) -> (usize, f64) {
        let i = match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(grid.len() - 2),
        };
        let t = ((x - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
        (i, t)
    }

    fn eval(&self, q: f64, theta: f64) -> f64 {
        if q < self.q[0] || q > *self.q.last().unwrap() {
            return 0.0;
        }
        let (i, s) = Self::locate(&self.q, q);
        let (j, t) = Self::locate(&self.theta, theta);
        let n = self.theta.len();
        let v = |a: usize, b: usize| self.values[a * n + b];
        (1.0 - s) * ((1.0 - t) * v(i, j) + t * v(i, j + 1)) + s * ((1.0 - t) * v(i + 1, j) + t * v(i + 1, j + 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    GaussianIsotropic {
        sigma: f64,
    },
    FermiStep {
        q_f: f64,
    },
    FermiSmeared {
        q_f: f64,
        width: f64,
    },
    KineticShifted {
        base: Box<MomentumDistribution>,
        q0: f64,
        axis: FieldAxis,
    },
    Tabulated(TabulatedDensity),
}

/// A momentum-space density `amplitude * shape(q, theta)`, optionally
/// clipped to zero above `cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDistribution {
    kind: DistributionKind,
    amplitude: f64,
    cutoff: Option<f64>,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl MomentumDistribution {
    /// Normalized Gaussian `rho = (2 pi)^{3/2} / sigma^3 exp(-q^2 / 2 sigma^2)`.
    pub fn gaussian_isotropic(sigma: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        Ok(Self {
            kind: DistributionKind::GaussianIsotropic { sigma },
            amplitude: (2.0 * PI).powf(1.5) / sigma.powi(3),
            cutoff: None,
        })
    }

    /// Uniformly filled Fermi sphere, `rho = 6 pi^2 / q_F^3` inside.
    pub fn fermi_step(q_f: f64) -> Result<Self> {
        check_positive("q_f", q_f)?;
        Ok(Self {
            kind: DistributionKind::FermiStep { q_f },
            amplitude: 6.0 * PI * PI / q_f.powi(3),
            cutoff: None,
        })
    }

    /// Fermi sphere with a Fermi-Dirac shaped edge of width `width` in q.
    pub fn fermi_smeared(q_f: f64, width: f64) -> Result<Self> {
        check_positive("q_f", q_f)?;
        check_positive("width", width)?;
        let raw = Self {
            kind: DistributionKind::FermiSmeared { q_f, width },
            amplitude: 1.0,
            cutoff: None,
        };
        Ok(normalize_distribution(&raw)?.0)
    }

    /// Relaxation-time solution in a uniform field with momentum scale `q0`.
    /// The base must be isotropic; its normalization carries over.
    pub fn kinetic_shifted(base: MomentumDistribution, q0: f64, axis: FieldAxis) -> Result<Self> {
        check_positive("q0", q0)?;
        if !base.is_isotropic() {
            return Err(Error::InvalidParameter(
                "kinetic base density must be an isotropic equilibrium density".into(),
            ));
        }
        Ok(Self {
            kind: DistributionKind::KineticShifted {
                base: Box::new(base),
                q0,
                axis,
            },
            amplitude: 1.0,
            cutoff: None,
        })
    }

    /// Tabulated density; not normalized automatically.
    pub fn tabulated(table: TabulatedDensity) -> Self {
        Self {
            kind: DistributionKind::Tabulated(table),
            amplitude: 1.0,
            cutoff: None,
        }
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Multiplies the density by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            amplitude: self.amplitude * k,
            ..self.clone()
        }
    }

    /// Clips the density to zero above `cutoff` (isotropic kinds only).
    pub fn with_cutoff(&self, cutoff: f64) -> Result<Self> {
        check_positive("cutoff", cutoff)?;
        if !self.is_isotropic() {
            return Err(Error::InvalidParameter(
                "cutoff is only defined for isotropic densities".into(),
            ));
        }
        Ok(Self {
            cutoff: Some(self.cutoff.map_or(cutoff, |c| c.min(cutoff))),
            ..self.clone()
        })
    }

    /// Same distribution with every momentum parameter multiplied by `s`
    /// and the amplitude divided by `s^3` (keeps the normalization).
    pub fn momentum_scaled(&self, s: f64) -> Result<Self> {
        check_positive("scale", s)?;
        let kind = match &self.kind {
            DistributionKind::GaussianIsotropic { sigma } => DistributionKind::GaussianIsotropic { sigma: sigma * s },
            DistributionKind::FermiStep { q_f } => DistributionKind::FermiStep { q_f: q_f * s },
            DistributionKind::FermiSmeared { q_f, width } => DistributionKind::FermiSmeared {
                q_f: q_f * s,
                width: width * s,
            },
            DistributionKind::KineticShifted { base, q0, axis } => DistributionKind::KineticShifted {
                base: Box::new(base.momentum_scaled(s)?),
                q0: q0 * s,
                axis: *axis,
            },
            DistributionKind::Tabulated(t) => DistributionKind::Tabulated(TabulatedDensity {
                q: t.q.iter().map(|q| q * s).collect(),
                theta: t.theta.clone(),
                values: t.values.clone(),
            }),
        };
        let amplitude = match self.kind {
            DistributionKind::KineticShifted { .. } => self.amplitude,
            _ => self.amplitude / s.powi(3),
        };
        Ok(Self {
            kind,
            amplitude,
            cutoff: self.cutoff.map(|c| c * s),
        })
    }

    pub fn is_isotropic(&self) -> bool {
        match &self.kind {
            DistributionKind::GaussianIsotropic { .. }
            | DistributionKind::FermiStep { .. }
            | DistributionKind::FermiSmeared { .. } => true,
            DistributionKind::KineticShifted { .. } => false,
            DistributionKind::Tabulated(t) => {
                let n = t.theta.len();
                t.values.chunks(n).all(|row| row.iter().all(|v| *v == row[0]))
            }
        }
    }

    /// Fermi momentum of the (base) density, when there is one.
    pub fn fermi_momentum(&self) -> Option<f64> {
        match &self.kind {
            DistributionKind::FermiStep { q_f } | DistributionKind::FermiSmeared { q_f, .. } => Some(*q_f),
            DistributionKind::KineticShifted { base, .. } => base.fermi_momentum(),
            _ => None,
        }
    }

    /// Natural momentum scale: q_F when there is a Fermi surface, else sigma.
    pub fn reference_scale(&self) -> f64 {
        match &self.kind {
            DistributionKind::GaussianIsotropic { sigma } => *sigma,
            DistributionKind::FermiStep { q_f } | DistributionKind::FermiSmeared { q_f, .. } => *q_f,
            DistributionKind::KineticShifted { base, .. } => base.reference_scale(),
            DistributionKind::Tabulated(t) => *t.q.last().unwrap(),
        }
    }

    /// Value of the isotropic density at modulus `q` (for isotropic kinds
    /// this is rho_0 as a function of energy q^2 / 2m*).
    pub fn radial(&self, q: f64) -> f64 {
        self.density(q, 0.5 * PI)
    }

    /// rho_0 at zero momentum.
    pub fn value_at_zero(&self) -> f64 {
        self.density(0.0, 0.5 * PI)
    }

    /// Largest momentum with non-negligible density, for isotropic kinds.
    fn radial_extent(&self) -> f64 {
        let raw = match &self.kind {
            DistributionKind::GaussianIsotropic { sigma } => sigma * (2.0 * TAIL_DECADES).sqrt(),
            DistributionKind::FermiStep { q_f } => *q_f,
            DistributionKind::FermiSmeared { q_f, width } => q_f + TAIL_DECADES * width,
            DistributionKind::KineticShifted { base, q0, .. } => base.radial_extent() + KINETIC_WINDOW * q0,
            DistributionKind::Tabulated(t) => *t.q.last().unwrap(),
        };
        self.cutoff.map_or(raw, |c| c.min(raw))
    }

    fn radial_kink(&self) -> Option<f64> {
        let k = match &self.kind {
            DistributionKind::FermiSmeared { q_f, .. } => Some(*q_f),
            _ => None,
        };
        k.filter(|k| self.cutoff.is_none_or(|c| *k < c))
    }

    /// Density at momentum modulus `q` and polar angle `theta`.
    pub fn density(&self, q: f64, theta: f64) -> f64 {
        if q < 0.0 {
            return 0.0;
        }
        if let Some(c) = self.cutoff {
            if q > c {
                return 0.0;
            }
        }
        let shape = match &self.kind {
            DistributionKind::GaussianIsotropic { sigma } => (-0.5 * (q / sigma).powi(2)).exp(),
            DistributionKind::FermiStep { q_f } => {
                if q < *q_f {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionKind::FermiSmeared { q_f, width } => {
                let x = (q - q_f) / width;
                if x > 0.0 {
                    let e = (-x).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + x.exp())
                }
            }
            DistributionKind::KineticShifted { .. } => {
                let (s, c) = theta.sin_cos();
                return self.density_cyl(q * s.abs(), q * c);
            }
            DistributionKind::Tabulated(t) => t.eval(q, theta),
        };
        self.amplitude * shape
    }

    /// Density in cylindrical momentum coordinates.
    pub fn density_cyl(&self, q_perp: f64, q_z: f64) -> f64 {
        match &self.kind {
            DistributionKind::KineticShifted { base, q0, axis } => {
                let q_z = match axis {
                    FieldAxis::PlusZ => q_z,
                    FieldAxis::MinusZ => -q_z,
                };
                self.amplitude * kinetic_density(base, *q0, q_perp.abs(), q_z)
            }
            _ => {
                let q = q_perp.hypot(q_z);
                let theta = if q > 0.0 {
                    (q_z / q).clamp(-1.0, 1.0).acos()
                } else {
                    0.5 * PI
                };
                self.density(q, theta)
            }
        }
    }

    /// Breakpoints `[0, ..., q_max]` of the radial profile along `theta`:
    /// the density vanishes (or is negligible) past the last entry and is
    /// smooth between consecutive entries.
    pub fn radial_breaks(&self, theta: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        match &self.kind {
            DistributionKind::KineticShifted { base, q0, axis } => {
                let (s, mut u) = theta.sin_cos();
                if *axis == FieldAxis::MinusZ {
                    u = -u;
                }
                let s = s.abs();
                let r = base.radial_extent();
                let kink = base.radial_kink().or(match base.kind {
                    DistributionKind::FermiStep { .. } => Some(r),
                    _ => None,
                });
                let q_max = if u >= 0.0 {
                    r
                } else {
                    let by_decay = (r + KINETIC_WINDOW * q0) / -u;
                    if s > 0.0 {
                        by_decay.min(r / s)
                    } else {
                        by_decay
                    }
                };
                if let Some(k) = kink {
                    pts.push(k);
                }
                pts.push(r);
                if s > 0.0 {
                    if let Some(k) = kink {
                        pts.push(k / s);
                    }
                    pts.push(r / s);
                }
                pts.retain(|p| *p <= q_max);
                pts.push(q_max);
            }
            DistributionKind::Tabulated(t) => {
                pts.extend(t.q.iter().copied().filter(|q| *q > 0.0));
                if let Some(c) = self.cutoff {
                    pts.retain(|p| *p < c);
                    pts.push(c);
                }
            }
            _ => {
                if let Some(k) = self.radial_kink() {
                    pts.push(k);
                }
                pts.push(self.radial_extent());
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));
        pts
    }

    /// `int_0^inf q^power rho(q, theta) dq`.
    pub fn radial_moment(&self, power: i32, theta: f64, tol: Tolerance) -> Result<f64> {
        let pts = self.radial_breaks(theta);
        Ok(quad::integrate_with_breaks(|q| q.powi(power) * self.density(q, theta), &pts, tol)?.value)
    }

    /// `int d^3q / (2 pi)^3 q^power rho`.
    pub fn moment_3d(&self, power: i32, tol: Tolerance) -> Result<f64> {
        if self.is_isotropic() {
            return Ok(self.radial_moment(power + 2, 0.5 * PI, tol)? / (2.0 * PI * PI));
        }
        // (1 / 4 pi^2) int_{-1}^{1} du int q^{2+power} rho dq
        let mut err = None;
        let e = quad::integrate_with_breaks(
            |u| {
                let theta = u.clamp(-1.0, 1.0).acos();
                match self.radial_moment(power + 2, theta, tol) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            &[-1.0, 0.0, 1.0],
            tol,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(e.value / (4.0 * PI * PI))
    }

    /// Relative spread of `int q rho dq` over polar angles; 0 for
    /// isotropic densities.
    pub fn anisotropy(&self, tol: Tolerance) -> Result<f64> {
        if self.is_isotropic() {
            return Ok(0.0);
        }
        let vals = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|t| self.radial_moment(1, t * PI, tol))
            .collect::<Result<Vec<_>>>()?;
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        if mean == 0.0 {
            return Err(Error::ZeroDensity);
        }
        Ok((max - min) / mean.abs())
    }
}

/// `rho(q_perp, q_z) = (1/q0) int_{q_z}^inf exp(-(xi - q_z)/q0) rho_0(sqrt(q_perp^2 + xi^2)) dxi`.
fn kinetic_density(base: &MomentumDistribution, q0: f64, q_perp: f64, q_z: f64) -> f64 {
    let r = base.radial_extent();
    if q_perp >= r {
        return 0.0;
    }
    let a = (r * r - q_perp * q_perp).sqrt();
    let lo = q_z.max(-a);
    if lo >= a {
        return 0.0;
    }
    let lead = (-(lo - q_z) / q0).exp();
    if let DistributionKind::FermiStep { .. } = base.kind {
        // rho_0 is constant on |xi| < a
        let tail = (-(a - lo) / q0).exp();
        return base.amplitude * lead * (1.0 - tail);
    }
    let hi = a.min(lo + KINETIC_WINDOW * q0);
    let mut pts = vec![lo];
    if let Some(k) = base.radial_kink() {
        if k > q_perp {
            let x = (k * k - q_perp * q_perp).sqrt();
            for p in [-x, x] {
                if p > lo && p < hi {
                    pts.push(p);
                }
            }
        }
    }
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let integral = quad::integrate_with_breaks(
        |xi| (-(xi - lo) / q0).exp() * base.radial(q_perp.hypot(xi)),
        &pts,
        INNER_TOL,
    )
    .map(|e| e.value)
    .unwrap_or(f64::NAN);
    lead * integral / q0
}

/// Rescales `d` so that `int d^3q/(2 pi)^3 rho = 1`; also returns the
/// factor that was applied.
pub fn normalize_distribution(d: &MomentumDistribution) -> Result<(MomentumDistribution, f64)> {
    let tol = Tolerance::new(1e-300, 1e-12);
    let norm = d.moment_3d(0, tol)?;
    if !norm.is_finite() {
        return Err(Error::NonIntegrable("normalization integral is not finite".into()));
    }
    if norm <= 0.0 {
        return Err(Error::ZeroDensity);
    }
    let factor = 1.0 / norm;
    Ok((d.scaled(factor), factor))
}

/// Root-mean-square momentum `sqrt(<q^2>)` of a normalized density.
pub fn momentum_variance(d: &MomentumDistribution) -> Result<f64> {
    let m2 = d.moment_3d(2, Tolerance::new(1e-300, 1e-12))?;
    if !(m2.is_finite() && m2 > 0.0) {
        return Err(Error::NonIntegrable(format!("second moment is {m2}")));
    }
    Ok(m2.sqrt())
}
