//! Run configuration: the shipped defaults with a user TOML file merged on
//! top, then strict deserialization and parameter validation.

use qfnoise::distribution::DistributionSpec;
use qfnoise::geometry::{LeadPlacement, SampleGeometry};
use qfnoise::observation::Vec3;
use qfnoise::units::UnitMode;
use qfnoise::RegimeThresholds;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULTS: &str = include_str!("../config/defaults.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub units: UnitsBlock,
    pub tolerance: ToleranceBlock,
    pub regime: RegimeThresholds,
    pub distribution: DistributionSpec,
    pub spectrum: SpectrumBlock,
    pub kinetic: KineticBlock,
    pub gfactor: GFactorBlock,
    pub ensemble: EnsembleBlock,
    pub hooge: HoogeBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsBlock {
    pub mode: UnitMode,
    pub q_ref_si: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    pub abs: f64,
    pub rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Asymptotic,
    Spherical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub mass: f64,
    pub r: f64,
    pub zeta: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticBlock {
    pub chi: Vec<f64>,
    pub q0_over_qf_min: f64,
    pub q0_over_qf_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GFactorBlock {
    pub samples: u64,
    pub lead_radius: f64,
    pub x_lead_a: Vec3,
    pub x_lead_b: Vec3,
    pub sample: SampleGeometry,
}

impl GFactorBlock {
    pub fn leads(&self) -> LeadPlacement {
        LeadPlacement::new(self.x_lead_a, self.x_lead_b, self.lead_radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    pub n_electrons: u64,
    pub trials: u64,
    pub correlation: f64,
    pub omega: f64,
    pub t_window: f64,
    pub q0: f64,
    pub e_charge: f64,
    pub lead_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoogeBlock {
    pub length_scale: f64,
    pub m_star: f64,
    pub tau: f64,
    pub field: f64,
    pub n_density: f64,
    pub frequency: f64,
}

/// Recursively overlays `user` on `base`. A user table carrying a `kind`
/// tag replaces the base table whole, since its fields depend on the tag.
fn merge(base: &mut toml::Value, user: toml::Value) {
    match (base, user) {
        (toml::Value::Table(b), toml::Value::Table(u)) => {
            for (k, v) in u {
                match b.get_mut(&k) {
                    Some(slot) if v.as_table().is_none_or(|t| !t.contains_key("kind")) => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl RunConfig {
    pub fn defaults() -> Self {
        toml::from_str(DEFAULTS).expect("shipped defaults parse")
    }

    /// Defaults overlaid with the TOML text `user`.
    pub fn from_toml(user: &str) -> Result<Self, CliError> {
        let mut base: toml::Value = toml::from_str(DEFAULTS).expect("shipped defaults parse");
        let user: toml::Value = toml::from_str(user).map_err(|e| CliError::Config(vec![e.message().to_string()]))?;
        merge(&mut base, user);
        base.try_into()
            .map_err(|e: toml::de::Error| CliError::Config(vec![e.message().to_string()]))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Every parameter problem in the configuration.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = self.distribution.validate();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                errs.push(format!("{name} must be positive and finite, got {v}"));
            }
        };
        positive("units.q_ref_si", self.units.q_ref_si);
        positive("tolerance.abs", self.tolerance.abs);
        positive("tolerance.rel", self.tolerance.rel);
        positive("regime.eps1", self.regime.eps1);
        positive("regime.eps2", self.regime.eps2);

        let s = &self.spectrum;
        positive("spectrum.mass", s.mass);
        positive("spectrum.r", s.r);
        positive("spectrum.omega_min", s.omega_min);
        positive("spectrum.omega_max", s.omega_max);

        let k = &self.kinetic;
        positive("kinetic.q0_over_qf_min", k.q0_over_qf_min);
        positive("kinetic.q0_over_qf_max", k.q0_over_qf_max);

        let g = &self.gfactor;
        let e = &self.ensemble;
        positive("ensemble.omega", e.omega.abs());
        positive("ensemble.t_window", e.t_window);
        positive("ensemble.q0", e.q0);
        positive("ensemble.e_charge", e.e_charge);

        let h = &self.hooge;
        positive("hooge.length_scale", h.length_scale);
        positive("hooge.m_star", h.m_star);
        positive("hooge.tau", h.tau);
        positive("hooge.field", h.field);
        positive("hooge.n_density", h.n_density);
        positive("hooge.frequency", h.frequency);

        if s.zeta.abs() > s.r {
            errs.push(format!("spectrum.zeta = {} exceeds spectrum.r = {}", s.zeta, s.r));
        }
        if s.omega_min > s.omega_max {
            errs.push("spectrum.omega_min exceeds spectrum.omega_max".into());
        }
        if s.points == 0 {
            errs.push("spectrum.points must be at least 1".into());
        }
        if s.methods.is_empty() {
            errs.push("spectrum.methods is empty".into());
        }
        if k.chi.is_empty() {
            errs.push("kinetic.chi is empty".into());
        }
        for &chi in &k.chi {
            if !(chi > 0.0 && chi <= std::f64::consts::FRAC_PI_2) {
                errs.push(format!("kinetic.chi = {chi} must lie in (0, pi/2]"));
            }
        }
        if k.q0_over_qf_min > k.q0_over_qf_max {
            errs.push("kinetic.q0_over_qf_min exceeds kinetic.q0_over_qf_max".into());
        }
        if k.points < 2 {
            errs.push("kinetic.points must be at least 2 for the slope fit".into());
        }
        if g.samples < 2 {
            errs.push("gfactor.samples must be at least 2".into());
        }
        if !(g.lead_radius.is_finite() && g.lead_radius >= 0.0) {
            errs.push(format!(
                "gfactor.lead_radius must be nonnegative, got {}",
                g.lead_radius
            ));
        }
        if let Err(err) = SampleGeometry::new(g.sample.shape, g.sample.origin) {
            errs.push(format!("gfactor.sample: {err}"));
        }
        if e.n_electrons == 0 {
            errs.push("ensemble.n_electrons must be at least 1".into());
        }
        if e.trials == 0 {
            errs.push("ensemble.trials must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&e.correlation) {
            errs.push(format!("ensemble.correlation = {} must lie in [0, 1]", e.correlation));
        }
        if !(e.lead_radius.is_finite() && e.lead_radius >= 0.0) {
            errs.push(format!(
                "ensemble.lead_radius must be nonnegative, got {}",
                e.lead_radius
            ));
        }
        if self.threads == Some(0) {
            errs.push("threads must be at least 1".into());
        }
        errs
    }
}
