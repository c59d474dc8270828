//! Sample-volume averages: the geometric G-factor, the total induced
//! voltage spectrum and the Hooge parameter.
//!
//! The per-electron voltage bracket factorizes as
//! `(S_a - S_b)(T_a - T_b)` with `S = zeta^2 / r^4` and `T = 1 / r` taken
//! relative to lead `a` or `b`. Finite leads average `S` and `T` over the
//! lead ball independently, which is what averaging the two observation
//! points of each two-point term amounts to.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::KineticParams;
use crate::observation::{norm, sub, ObservationGeometry, Vec3};
use crate::units::UnitSystem;

/// Samples per stratum; strata are reduced in index order.
pub const STRATUM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Box { lx: f64, ly: f64, lz: f64 },
    Cylinder { radius: f64, height: f64, axis: Axis },
    Sphere { radius: f64 },
}

/// A primitive sample. `origin` is the lower corner of a box, the center
/// of the base disk of a cylinder and the center of a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGeometry {
    pub shape: Shape,
    #[serde(default)]
    pub origin: Vec3,
}

impl SampleGeometry {
    pub fn new(shape: Shape, origin: Vec3) -> Result<Self> {
        let dims: Vec<f64> = match shape {
            Shape::Box { lx, ly, lz } => vec![lx, ly, lz],
            Shape::Cylinder { radius, height, .. } => vec![radius, height],
            Shape::Sphere { radius } => vec![radius],
        };
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) || origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad sample dimensions {shape:?}")));
        }
        Ok(Self { shape, origin })
    }

    pub fn unit_cube() -> Self {
        Self {
            shape: Shape::Box {
                lx: 1.0,
                ly: 1.0,
                lz: 1.0,
            },
            origin: [0.0; 3],
        }
    }

    pub fn volume(&self) -> f64 {
        match self.shape {
            Shape::Box { lx, ly, lz } => lx * ly * lz,
            Shape::Cylinder { radius, height, .. } => PI * radius * radius * height,
            Shape::Sphere { radius } => 4.0 / 3.0 * PI * radius.powi(3),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.shape {
            Shape::Box { lx, ly, lz } => (lx * lx + ly * ly + lz * lz).sqrt(),
            Shape::Cylinder { radius, height, .. } => (2.0 * radius).hypot(height),
            Shape::Sphere { radius } => 2.0 * radius,
        }
    }

    pub fn center(&self) -> Vec3 {
        let o = self.origin;
        match self.shape {
            Shape::Box { lx, ly, lz } => [o[0] + 0.5 * lx, o[1] + 0.5 * ly, o[2] + 0.5 * lz],
            Shape::Cylinder { height, axis, .. } => {
                let mut c = o;
                c[axis.index()] += 0.5 * height;
                c
            }
            Shape::Sphere { .. } => o,
        }
    }

    /// Euclidean distance from `p` to the closed sample (0 inside).
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let d = sub(p, self.origin);
        match self.shape {
            Shape::Box { lx, ly, lz } => {
                let out = |x: f64, l: f64| (-x).max(x - l).max(0.0);
                let v = [out(d[0], lx), out(d[1], ly), out(d[2], lz)];
                norm(v)
            }
            Shape::Cylinder { radius, height, axis } => {
                let k = axis.index();
                let along = d[k];
                let radial = (norm(d).powi(2) - along * along).max(0.0).sqrt();
                let a = (-along).max(along - height).max(0.0);
                let b = (radial - radius).max(0.0);
                a.hypot(b)
            }
            Shape::Sphere { radius } => (norm(d) - radius).max(0.0),
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, p: Vec3) -> bool {
        let d = sub(p, self.origin);
        match self.shape {
            Shape::Box { lx, ly, lz } => {
                (0.0..=lx).contains(&d[0]) && (0.0..=ly).contains(&d[1]) && (0.0..=lz).contains(&d[2])
            }
            Shape::Cylinder { radius, height, axis } => {
                let k = axis.index();
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                (0.0..=height).contains(&d[k]) && d[i] * d[i] + d[j] * d[j] <= radius * radius
            }
            Shape::Sphere { radius } => d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= radius * radius,
        }
    }

    /// Uniform point in the sample.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec3 {
        let o = self.origin;
        match self.shape {
            Shape::Box { lx, ly, lz } => {
                let u: [f64; 3] = rng.gen();
                [o[0] + u[0] * lx, o[1] + u[1] * ly, o[2] + u[2] * lz]
            }
            Shape::Cylinder { radius, height, axis } => {
                let k = axis.index();
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let (a, b) = loop {
                    let a = 2.0 * rng.gen::<f64>() - 1.0;
                    let b = 2.0 * rng.gen::<f64>() - 1.0;
                    if a * a + b * b <= 1.0 {
                        break (a, b);
                    }
                };
                let mut p = o;
                p[i] += a * radius;
                p[j] += b * radius;
                p[k] += rng.gen::<f64>() * height;
                p
            }
            Shape::Sphere { radius } => loop {
                let u = [
                    2.0 * rng.gen::<f64>() - 1.0,
                    2.0 * rng.gen::<f64>() - 1.0,
                    2.0 * rng.gen::<f64>() - 1.0,
                ];
                if u[0] * u[0] + u[1] * u[1] + u[2] * u[2] <= 1.0 {
                    break [o[0] + u[0] * radius, o[1] + u[1] * radius, o[2] + u[2] * radius];
                }
            },
        }
    }

    /// Similar sample scaled by `s` about the coordinate origin.
    pub fn scaled(&self, s: f64) -> Self {
        let shape = match self.shape {
            Shape::Box { lx, ly, lz } => Shape::Box {
                lx: lx * s,
                ly: ly * s,
                lz: lz * s,
            },
            Shape::Cylinder { radius, height, axis } => Shape::Cylinder {
                radius: radius * s,
                height: height * s,
                axis,
            },
            Shape::Sphere { radius } => Shape::Sphere { radius: radius * s },
        };
        Self {
            shape,
            origin: self.origin.map(|c| c * s),
        }
    }
}

fn default_axis() -> Vec3 {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadPlacement {
    pub x_lead_a: Vec3,
    pub x_lead_b: Vec3,
    /// Radius of the spherical lead volume; 0 for point leads.
    #[serde(default)]
    pub lead_radius: f64,
    /// Unit vector of the field axis, along which `zeta` is measured.
    #[serde(default = "default_axis")]
    pub alignment_axis: Vec3,
}

impl LeadPlacement {
    pub fn new(x_lead_a: Vec3, x_lead_b: Vec3, lead_radius: f64) -> Self {
        Self {
            x_lead_a,
            x_lead_b,
            lead_radius,
            alignment_axis: default_axis(),
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            x_lead_a: self.x_lead_b,
            x_lead_b: self.x_lead_a,
            ..*self
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            x_lead_a: self.x_lead_a.map(|c| c * s),
            x_lead_b: self.x_lead_b.map(|c| c * s),
            lead_radius: self.lead_radius * s,
            alignment_axis: self.alignment_axis,
        }
    }

    /// Lead separation `|x_b - x_a|`.
    pub fn distance(&self) -> f64 {
        norm(sub(self.x_lead_b, self.x_lead_a))
    }

    fn validate(&self) -> Result<Vec3> {
        if !(self.lead_radius.is_finite() && self.lead_radius >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lead_radius must be nonnegative, got {}",
                self.lead_radius
            )));
        }
        let n = norm(self.alignment_axis);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(
                "alignment_axis must be a nonzero vector".into(),
            ));
        }
        Ok(self.alignment_axis.map(|c| c / n))
    }
}

/// 32-point rule for the average over the unit ball, exact for
/// polynomials of degree 5: icosahedron vertices on one shell and
/// dodecahedron vertices on another, at the two-point Gauss radii of the
/// radial weight `3 rho^2`.
#[derive(Debug, Clone)]
pub struct BallRule {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn new() -> Self {
        // Gauss nodes in t = rho^2 for the weight (3/2) sqrt(t) on [0, 1]
        let disc = (100.0_f64 / 81.0 - 20.0 / 21.0).sqrt();
        let t1 = (10.0 / 9.0 - disc) / 2.0;
        let t2 = (10.0 / 9.0 + disc) / 2.0;
        let w2 = (0.6 - t1) / (t2 - t1);
        let w1 = 1.0 - w2;
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        let mut ico = Vec::new();
        for a in [-1.0, 1.0] {
            for b in [-phi, phi] {
                ico.push([0.0, a, b]);
                ico.push([a, b, 0.0]);
                ico.push([b, 0.0, a]);
            }
        }
        let mut dod = Vec::new();
        for a in [-1.0, 1.0] {
            for b in [-1.0, 1.0] {
                for c in [-1.0, 1.0] {
                    dod.push([a, b, c]);
                }
                let (p, q) = (a / phi, b * phi);
                dod.push([0.0, p, q]);
                dod.push([p, q, 0.0]);
                dod.push([q, 0.0, p]);
            }
        }
        let mut nodes = Vec::with_capacity(32);
        let mut weights = Vec::with_capacity(32);
        for (shell, t, w) in [(ico, t1, w1), (dod, t2, w2)] {
            let n = shell.len() as f64;
            for v in shell {
                let k = t.sqrt() / norm(v);
                nodes.push(v.map(|c| c * k));
                weights.push(w / n);
            }
        }
        Self { nodes, weights }
    }
}

impl Default for BallRule {
    fn default() -> Self {
        Self::new()
    }
}

/// Ball averages `(<zeta^2 / r^4>, <1 / r>)` of the two kernels for an
/// electron at `x0` and a lead at `c`.
fn lead_kernels(x0: Vec3, c: Vec3, radius: f64, axis: Vec3, rule: &BallRule, r_min: f64) -> (f64, f64) {
    let one = |p: Vec3| {
        let d = sub(p, x0);
        let r = norm(d).max(r_min);
        let zeta = d[0] * axis[0] + d[1] * axis[1] + d[2] * axis[2];
        (zeta * zeta / r.powi(4), 1.0 / r)
    };
    if radius == 0.0 {
        return one(c);
    }
    let mut s = 0.0;
    let mut t = 0.0;
    for (n, w) in rule.nodes.iter().zip(&rule.weights) {
        let (a, b) = one([c[0] + radius * n[0], c[1] + radius * n[1], c[2] + radius * n[2]]);
        s += w * a;
        t += w * b;
    }
    (s, t)
}

/// The G-factor integrand at electron position `x0`.
pub fn g_integrand(x0: Vec3, leads: &LeadPlacement, rule: &BallRule, r_min: f64) -> f64 {
    let axis = leads.alignment_axis;
    let (sa, ta) = lead_kernels(x0, leads.x_lead_a, leads.lead_radius, axis, rule, r_min);
    let (sb, tb) = lead_kernels(x0, leads.x_lead_b, leads.lead_radius, axis, rule, r_min);
    (sa - sb) * (ta - tb)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Distance guard; `None` uses `1e-3` times the sample diameter.
    pub r_min: Option<f64>,
    /// Share of uniform proposals; `None` picks 1 for leads away from the
    /// sample and 0.5 otherwise.
    pub uniform_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFactorResult {
    pub g: f64,
    pub abs_g: f64,
    pub mc_std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// The estimate came out negative.
    pub negative: bool,
    /// The integrand took both signs over the sample.
    pub mixed_sign: bool,
}

/// Mixture proposal over the sample: uniform plus `1/r^3` shells around
/// each lead with log-uniform radius in `[r_lo, r_hi]`.
struct Proposal {
    sample: SampleGeometry,
    volume: f64,
    uniform: f64,
    centers: [Vec3; 2],
    r_lo: f64,
    r_hi: f64,
    log_ratio: f64,
}

impl Proposal {
    fn draw<R: Rng>(&self, rng: &mut R) -> Vec3 {
        let u: f64 = rng.gen();
        if u < self.uniform {
            return self.sample.sample(rng);
        }
        let c = if rng.gen::<f64>() < 0.5 {
            self.centers[0]
        } else {
            self.centers[1]
        };
        let r = self.r_lo * (self.log_ratio * rng.gen::<f64>()).exp();
        let cos_t = 2.0 * rng.gen::<f64>() - 1.0;
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = 2.0 * PI * rng.gen::<f64>();
        [
            c[0] + r * sin_t * phi.cos(),
            c[1] + r * sin_t * phi.sin(),
            c[2] + r * cos_t,
        ]
    }

    /// Proposal density at a point inside the sample.
    fn density(&self, x: Vec3) -> f64 {
        let mut p = self.uniform / self.volume;
        if self.uniform < 1.0 {
            for c in self.centers {
                let r = norm(sub(x, c));
                if r >= self.r_lo && r <= self.r_hi {
                    p += 0.5 * (1.0 - self.uniform) / (4.0 * PI * r.powi(3) * self.log_ratio);
                }
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    sum: f64,
    sum_sq: f64,
    max_abs: f64,
    sum_abs: f64,
    pos: bool,
    neg: bool,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.sum_abs += o.sum_abs;
        self.max_abs = self.max_abs.max(o.max_abs);
        self.pos |= o.pos;
        self.neg |= o.neg;
        self
    }
}

/// `G = int_Omega d^3x0 (S_a - S_b)(T_a - T_b)` by Monte Carlo.
pub fn g_factor(sg: &SampleGeometry, leads: &LeadPlacement, n_samples: u64, seed: u64) -> Result<GFactorResult> {
    g_factor_with(sg, leads, n_samples, seed, McOptions::default())
}

pub fn g_factor_with(
    sg: &SampleGeometry,
    leads: &LeadPlacement,
    n_samples: u64,
    seed: u64,
    opts: McOptions,
) -> Result<GFactorResult> {
    let axis = leads.validate()?;
    let leads = LeadPlacement {
        alignment_axis: axis,
        ..*leads
    };
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least two Monte Carlo samples".into()));
    }
    if leads.lead_radius == 0.0 {
        for c in [leads.x_lead_a, leads.x_lead_b] {
            if sg.contains(c) {
                return Err(Error::SingularConfiguration(format!(
                    "point lead at {c:?} lies in the closed sample; give it a radius"
                )));
            }
        }
    }
    let diameter = sg.diameter();
    let r_min = opts.r_min.unwrap_or(1e-3 * diameter);
    if !(r_min > 0.0) {
        return Err(Error::InvalidParameter("r_min must be positive".into()));
    }
    let near = [leads.x_lead_a, leads.x_lead_b]
        .iter()
        .any(|c| sg.distance_to(*c) <= 2.0 * leads.lead_radius);
    let uniform = opts.uniform_fraction.unwrap_or(if near { 0.5 } else { 1.0 });
    if !(uniform > 0.0 && uniform <= 1.0) {
        return Err(Error::InvalidParameter("uniform_fraction must lie in (0, 1]".into()));
    }
    let r_hi = diameter
        + [leads.x_lead_a, leads.x_lead_b]
            .iter()
            .map(|c| norm(sub(*c, sg.center())))
            .fold(0.0, f64::max);
    let proposal = Proposal {
        sample: *sg,
        volume: sg.volume(),
        uniform,
        centers: [leads.x_lead_a, leads.x_lead_b],
        r_lo: r_min,
        r_hi,
        log_ratio: (r_hi / r_min).ln(),
    };
    let rule = BallRule::new();
    let base = ChaCha8Rng::seed_from_u64(seed);

    let stratum = |k: u64| -> Partial {
        let start = k * STRATUM as u64;
        let end = (start + STRATUM as u64).min(n_samples);
        let mut acc = Partial::default();
        for i in start..end {
            let mut rng = base.clone();
            rng.set_stream(i);
            let x = proposal.draw(&mut rng);
            let w = if sg.contains(x) {
                g_integrand(x, &leads, &rule, r_min) / proposal.density(x)
            } else {
                0.0
            };
            acc.sum += w;
            acc.sum_sq += w * w;
            acc.sum_abs += w.abs();
            acc.max_abs = acc.max_abs.max(w.abs());
            acc.pos |= w > 0.0;
            acc.neg |= w < 0.0;
        }
        acc
    };
    let n_strata = n_samples.div_ceil(STRATUM as u64);
    let parts = crate::par::map_indexed(n_strata, opts.threads, stratum)?;
    let total = parts.into_iter().fold(Partial::default(), Partial::merge);

    let n = n_samples as f64;
    let mean = total.sum / n;
    let var = ((total.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let std_error = (var / n).sqrt();
    if !(mean.is_finite() && std_error.is_finite()) {
        return Err(Error::McVarianceExplosion("non-finite estimate".into()));
    }
    if n_samples >= 10_000 && total.max_abs > 0.5 * total.sum_abs {
        return Err(Error::McVarianceExplosion(format!(
            "one sample carries {:.0}% of the total weight",
            100.0 * total.max_abs / total.sum_abs
        )));
    }
    Ok(GFactorResult {
        g: mean,
        abs_g: mean.abs(),
        mc_std_error: std_error,
        n_samples,
        seed,
        negative: mean < 0.0,
        mixed_sign: total.pos && total.neg,
    })
}

/// Per-electron induced voltage correlation for the electron at `g.x0`
/// with leads at `g.x` and `g.x_prime`, from the four two-point terms and
/// from the closed bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageTerms {
    pub assembled: f64,
    pub direct: f64,
}

/// `e^2 q0^2 rho_0(0) / (32 pi^4 |omega|)`.
fn induced_prefactor(kp: &KineticParams, omega: f64, e_charge: f64) -> f64 {
    let q0 = kp.q0();
    e_charge * e_charge * q0 * q0 * kp.rho0_at_zero / (32.0 * PI.powi(4) * omega.abs())
}

pub fn voltage_correlation_terms(
    g: &ObservationGeometry,
    kp: &KineticParams,
    omega: f64,
    e_charge: f64,
) -> Result<VoltageTerms> {
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::Domain(format!("omega must be finite and nonzero, got {omega}")));
    }
    let k = induced_prefactor(kp, omega, e_charge);
    let (r, rp) = (g.r(), g.r_prime());
    let (z, zp) = (g.zeta(), g.zeta_prime());
    // two-point term with the field factor at `a` and the static factor at `b`
    let pair = |za: f64, ra: f64, rb: f64| k * za * za / (ra.powi(4) * rb);
    let assembled = pair(z, r, r) + pair(zp, rp, rp) - pair(zp, rp, r) - pair(z, r, rp);
    let bracket = z * z / r.powi(5) + zp * zp / rp.powi(5) - zp * zp / (rp.powi(4) * r) - z * z / (r.powi(4) * rp);
    Ok(VoltageTerms {
        assembled: assembled.abs(),
        direct: (k * bracket).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalSpectrum {
    pub magnitude: f64,
    pub std_error: f64,
    pub g: GFactorResult,
}

/// `|Delta C_U^tot| = e^2 q0^2 rho_0(0) |G| / (32 pi^4 |omega| Omega)` in
/// natural units.
pub fn total_induced_spectrum(
    sg: &SampleGeometry,
    leads: &LeadPlacement,
    kp: &KineticParams,
    omega: f64,
    e_charge: f64,
    n_samples: u64,
    seed: u64,
) -> Result<TotalSpectrum> {
    let g = g_factor(sg, leads, n_samples, seed)?;
    Ok(total_from_g(&g, sg, kp, omega, e_charge))
}

pub fn total_from_g(
    g: &GFactorResult,
    sg: &SampleGeometry,
    kp: &KineticParams,
    omega: f64,
    e_charge: f64,
) -> TotalSpectrum {
    let k = induced_prefactor(kp, omega, e_charge) / sg.volume();
    TotalSpectrum {
        magnitude: k * g.abs_g,
        std_error: k * g.mc_std_error,
        g: *g,
    }
}

/// SI version of the total spectrum in V^2 s. `kp` holds SI values
/// (kg, s, V/m, C) and `rho0_at_zero` is `2 / n` in m^3.
pub fn total_induced_spectrum_si(
    g: &GFactorResult,
    sg: &SampleGeometry,
    kp: &KineticParams,
    omega: f64,
    units: &UnitSystem,
) -> Result<f64> {
    units.require_si()?;
    let k0 = kp.e_charge * kp.field * kp.tau / units.hbar;
    let e2 = kp.e_charge * kp.e_charge / (units.epsilon0 * units.epsilon0);
    Ok(e2 * k0 * k0 * kp.rho0_at_zero * g.abs_g / (32.0 * PI.powi(4) * omega.abs() * sg.volume()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoogeResult {
    pub alpha: f64,
    /// `alpha / (N f)`: spectrum per squared mean voltage, in 1/Hz.
    pub c_over_u2: f64,
    /// The same ratio from the total spectrum divided by `(E l)^2`.
    pub c_over_u2_direct: f64,
}

/// Hooge parameter `alpha = e^4 tau^2 |G| / (epsilon0^2 32 pi^5 l^2 hbar^2)`
/// in SI, and the consistency ratio at angular frequency `omega`.
#[allow(clippy::too_many_arguments)]
pub fn hooge_alpha(
    g: &GFactorResult,
    sg: &SampleGeometry,
    leads: &LeadPlacement,
    kp: &KineticParams,
    n_electrons: f64,
    l: f64,
    omega: f64,
    units: &UnitSystem,
) -> Result<HoogeResult> {
    units.require_si()?;
    let axis = leads.validate()?;
    let sep = sub(leads.x_lead_b, leads.x_lead_a);
    let transverse = (sep[0].hypot(sep[1])) / norm(sep).max(f64::MIN_POSITIVE);
    if axis[0].abs() > 1e-12 || axis[1].abs() > 1e-12 || transverse > 1e-9 {
        return Err(Error::Domain("Hooge form needs leads aligned along z".into()));
    }
    if !(n_electrons > 0.0 && l > 0.0) {
        return Err(Error::InvalidParameter("N and l must be positive".into()));
    }
    let e = kp.e_charge;
    let alpha = e.powi(4) * kp.tau * kp.tau * g.abs_g
        / (units.epsilon0 * units.epsilon0 * 32.0 * PI.powi(5) * l * l * units.hbar * units.hbar);
    let f = omega.abs() / (2.0 * PI);
    let u = kp.field * l;
    let si = KineticParams {
        rho0_at_zero: 2.0 * sg.volume() / n_electrons,
        ..*kp
    };
    let direct = total_induced_spectrum_si(g, sg, &si, omega, units)? / (u * u);
    Ok(HoogeResult {
        alpha,
        c_over_u2: alpha / (n_electrons * f),
        c_over_u2_direct: direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_leads() -> LeadPlacement {
        LeadPlacement::new([0.5, 0.5, -0.25], [0.5, 0.5, 1.25], 0.05)
    }

    #[test]
    fn volumes_are_analytic() {
        let b = SampleGeometry::new(
            Shape::Box {
                lx: 1.0,
                ly: 2.0,
                lz: 3.0,
            },
            [0.0; 3],
        )
        .unwrap();
        assert_eq!(b.volume(), 6.0);
        let c = SampleGeometry::new(
            Shape::Cylinder {
                radius: 2.0,
                height: 3.0,
                axis: Axis::Z,
            },
            [0.0; 3],
        )
        .unwrap();
        assert!((c.volume() - 12.0 * PI).abs() < 1e-12 * c.volume());
        let s = SampleGeometry::new(Shape::Sphere { radius: 1.5 }, [0.0; 3]).unwrap();
        assert!((s.volume() - 4.5 * PI).abs() < 1e-12 * s.volume());
    }

    #[test]
    fn membership_on_boundaries() {
        let b = SampleGeometry::unit_cube();
        assert!(b.contains([0.0, 1.0, 0.5]));
        assert!(!b.contains([0.0, 1.0 + 1e-15, 0.5]));
        let c = SampleGeometry::new(
            Shape::Cylinder {
                radius: 1.0,
                height: 2.0,
                axis: Axis::X,
            },
            [0.0; 3],
        )
        .unwrap();
        assert!(c.contains([2.0, 1.0, 0.0]));
        assert!(!c.contains([2.0, 0.8, 0.8]));
        assert_eq!(b.distance_to([0.5, 0.5, -0.25]), 0.25);
    }

    #[test]
    fn ball_rule_integrates_degree_five() {
        let rule = BallRule::new();
        assert_eq!(rule.nodes.len(), 32);
        let avg = |f: &dyn Fn(Vec3) -> f64| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(n, w)| w * f(*n))
                .sum::<f64>()
        };
        assert!((avg(&|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((avg(&|p| p[0] * p[0]) - 0.2).abs() < 1e-14);
        assert!((avg(&|p| p[2].powi(4)) - 3.0 / 35.0).abs() < 1e-14);
        assert!((avg(&|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / 35.0).abs() < 1e-14);
        assert!(avg(&|p| p[0] * p[1].powi(2) * p[2].powi(2)).abs() < 1e-15);
    }

    #[test]
    fn point_lead_inside_sample_is_singular() {
        let leads = LeadPlacement::new([0.5, 0.5, 0.0], [0.5, 0.5, 1.25], 0.0);
        assert!(matches!(
            g_factor(&SampleGeometry::unit_cube(), &leads, 100, 1),
            Err(Error::SingularConfiguration(_))
        ));
    }

    #[test]
    fn lead_swap_leaves_g_unchanged() {
        let sg = SampleGeometry::unit_cube();
        let a = g_factor(&sg, &cube_leads(), 20_000, 3).unwrap();
        let b = g_factor(&sg, &cube_leads().swapped(), 20_000, 3).unwrap();
        assert!(((a.g - b.g) / a.g).abs() < 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let sg = SampleGeometry::unit_cube();
        let run = |t| {
            g_factor_with(
                &sg,
                &cube_leads(),
                30_000,
                11,
                McOptions {
                    threads: Some(t),
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let one = run(1);
        assert_eq!(one, run(2));
        assert_eq!(one, run(8));
    }

    #[test]
    fn coincident_leads_give_zero_voltage() {
        let g = ObservationGeometry::new([0.0, 0.0, 5.0], [0.0, 0.0, 5.0], [1.0, 2.0, 0.0]).unwrap();
        let kp = KineticParams::with_q0(0.05, 1.0, 1.0);
        let v = voltage_correlation_terms(&g, &kp, 1e-6, 0.3).unwrap();
        assert_eq!(v.direct, 0.0);
        assert_eq!(v.assembled, 0.0);
    }

    #[test]
    fn symmetric_electron_has_zero_bracket() {
        let g = ObservationGeometry::new([3.0, 0.0, 4.0], [-3.0, 0.0, 4.0], [0.0; 3]).unwrap();
        let kp = KineticParams::with_q0(0.05, 1.0, 1.0);
        let v = voltage_correlation_terms(&g, &kp, 1e-6, 0.3).unwrap();
        assert!(v.direct < 1e-30);
    }

    #[test]
    fn hooge_needs_si() {
        let sg = SampleGeometry::unit_cube();
        let g = g_factor(&sg, &cube_leads(), 1000, 1).unwrap();
        let kp = KineticParams::with_q0(0.05, 1.0, 1.0);
        let r = hooge_alpha(&g, &sg, &cube_leads(), &kp, 1e6, 1.0, 1.0, &UnitSystem::natural(1.0));
        assert!(matches!(r, Err(Error::Unit(_))));
    }
}
