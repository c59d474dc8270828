//! Many-electron sums of per-electron spectra with random emission times.
//!
//! Each electron contributes `m(x0) exp(i omega t0)` with `t' = 0`. The
//! emission-time model: with probability `c` an electron takes the trial's
//! shared `t0*`, otherwise an independent uniform time in `[0, T]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{g_integrand, BallRule, LeadPlacement, SampleGeometry};
use crate::kinetic::KineticParams;
use crate::observation::{ObservationGeometry, Vec3};
use crate::spectrum::{SpectrumEvaluator, SpectrumMethod};

/// Minimum number of trials for a normality verdict.
pub const MIN_GAUSSIAN_TRIALS: usize = 1000;

/// Magnitude model for one electron at `x0`.
#[derive(Debug, Clone)]
pub enum PerElectronModel {
    /// Signed induced-voltage bracket of the weak-field closed form.
    Induced { kp: KineticParams, e_charge: f64 },
    /// Zero-field `|C_00|` between the two lead centers, from the exact
    /// transform or the asymptote.
    Disconnected {
        evaluator: Box<SpectrumEvaluator>,
        method: SpectrumMethod,
        e_charge: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleElectron {
    pub x0: Vec3,
    pub t0: f64,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_electrons: u64,
    pub omega: f64,
    pub t_window: f64,
    /// Probability of sharing the trial's common emission time.
    pub correlation: f64,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(n_electrons: u64, omega: f64, t_window: f64, seed: u64) -> Self {
        Self {
            n_electrons,
            omega,
            t_window,
            correlation: 0.0,
            seed,
            threads: None,
        }
    }

    /// Set when `omega T < 20 (2 pi)`: phases do not wrap often enough.
    pub fn phase_underwrap(&self) -> bool {
        self.omega.abs() * self.t_window < 20.0 * 2.0 * PI
    }

    fn validate(&self) -> Result<()> {
        if self.n_electrons == 0 {
            return Err(Error::InvalidParameter("need at least one electron".into()));
        }
        if !(self.omega.is_finite() && self.omega != 0.0) {
            return Err(Error::Domain(format!(
                "omega must be finite and nonzero, got {}",
                self.omega
            )));
        }
        if !(self.t_window.is_finite() && self.t_window > 0.0) {
            return Err(Error::InvalidParameter("t_window must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return Err(Error::InvalidParameter(format!(
                "correlation must lie in [0, 1], got {}",
                self.correlation
            )));
        }
        Ok(())
    }
}

/// Evaluates per-electron magnitudes for one sample and lead pair.
pub struct Ensemble<'a> {
    sample: &'a SampleGeometry,
    leads: &'a LeadPlacement,
    model: &'a PerElectronModel,
    rule: BallRule,
    r_min: f64,
}

impl<'a> Ensemble<'a> {
    pub fn new(sample: &'a SampleGeometry, leads: &'a LeadPlacement, model: &'a PerElectronModel) -> Self {
        Self {
            sample,
            leads,
            model,
            rule: BallRule::new(),
            r_min: 1e-3 * sample.diameter(),
        }
    }

    pub fn with_r_min(mut self, r_min: f64) -> Self {
        self.r_min = r_min;
        self
    }

    /// Signed per-electron spectrum at `x0` (its modulus is the
    /// single-electron magnitude).
    pub fn magnitude(&self, x0: Vec3, omega: f64) -> Result<f64> {
        match self.model {
            PerElectronModel::Induced { kp, e_charge } => {
                let q0 = kp.q0();
                let k = e_charge * e_charge * q0 * q0 * kp.rho0_at_zero / (32.0 * PI.powi(4) * omega.abs());
                Ok(k * g_integrand(x0, self.leads, &self.rule, self.r_min))
            }
            PerElectronModel::Disconnected {
                evaluator,
                method,
                e_charge,
            } => {
                let g = ObservationGeometry::new(self.leads.x_lead_a, self.leads.x_lead_b, x0)?;
                let transform = match method {
                    SpectrumMethod::ExactI2 => evaluator.exact_i2(&g, omega)?.magnitude,
                    SpectrumMethod::AsymptoticI22 => evaluator.asymptotic_i22(&g, omega)?.magnitude,
                    SpectrumMethod::SphericalI23 => evaluator.spherical_i23(g.r(), omega)?.magnitude,
                };
                Ok(e_charge * e_charge * transform / (4.0 * PI * g.r_prime()))
            }
        }
    }

    /// Electrons of one trial, drawn from stream `(seed, trial)`.
    pub fn electrons(&self, cfg: &EnsembleConfig, trial: u64) -> Result<Vec<EnsembleElectron>> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial);
        let shared = rng.gen::<f64>() * cfg.t_window;
        let mut out = Vec::with_capacity(cfg.n_electrons as usize);
        for _ in 0..cfg.n_electrons {
            let x0 = self.sample.sample(&mut rng);
            let u: f64 = rng.gen();
            let own = rng.gen::<f64>() * cfg.t_window;
            let t0 = if u < cfg.correlation { shared } else { own };
            let m = self.magnitude(x0, cfg.omega)?;
            out.push(EnsembleElectron {
                x0,
                t0,
                amplitude: Complex64::from_polar(1.0, cfg.omega * t0) * m,
            });
        }
        Ok(out)
    }

    /// Summed complex spectrum of one trial.
    pub fn total(&self, cfg: &EnsembleConfig, trial: u64) -> Result<Complex64> {
        Ok(self.electrons(cfg, trial)?.iter().map(|e| e.amplitude).sum())
    }

    /// Totals of `trials` independent trials, in trial order.
    pub fn trials(&self, cfg: &EnsembleConfig, trials: u64) -> Result<Vec<Complex64>>
    where
        Self: Sync,
    {
        cfg.validate()?;
        crate::par::map_indexed(trials, cfg.threads, |t| self.total(cfg, t))?
            .into_iter()
            .collect()
    }
}

/// Result of one ensemble run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleTotal {
    pub total: Complex64,
    pub phase_underwrap: bool,
}

/// Sum over `cfg.n_electrons` electrons (trial 0 of `cfg.seed`).
pub fn ensemble_total(
    sg: &SampleGeometry,
    leads: &LeadPlacement,
    model: &PerElectronModel,
    cfg: &EnsembleConfig,
) -> Result<EnsembleTotal> {
    let total = Ensemble::new(sg, leads, model).total(cfg, 0)?;
    Ok(EnsembleTotal {
        total,
        phase_underwrap: cfg.phase_underwrap(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean_magnitude: f64,
    pub std: f64,
    pub median_magnitude: f64,
    pub iqr: f64,
    pub skewness_re: f64,
    pub skewness_im: f64,
    pub excess_kurtosis_re: f64,
    pub excess_kurtosis_im: f64,
    pub n_trials: usize,
    pub n_electrons: u64,
}

impl EnsembleStats {
    pub fn from_totals(totals: &[Complex64], n_electrons: u64) -> Self {
        let mags: Vec<f64> = totals.iter().map(|z| z.norm()).collect();
        let re: Vec<f64> = totals.iter().map(|z| z.re).collect();
        let im: Vec<f64> = totals.iter().map(|z| z.im).collect();
        let (mean, var) = mean_var(&mags);
        Self {
            mean_magnitude: mean,
            std: var.sqrt(),
            median_magnitude: median(&mags),
            iqr: iqr(&mags),
            skewness_re: skewness(&re),
            skewness_im: skewness(&im),
            excess_kurtosis_re: excess_kurtosis(&re),
            excess_kurtosis_im: excess_kurtosis(&im),
            n_trials: totals.len(),
            n_electrons,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianityThresholds {
    pub max_abs_skewness: f64,
    pub max_abs_excess_kurtosis: f64,
}

impl Default for GaussianityThresholds {
    fn default() -> Self {
        Self {
            max_abs_skewness: 0.15,
            max_abs_excess_kurtosis: 0.3,
        }
    }
}

/// Moment test of the real and imaginary parts of the totals.
pub fn gaussianity_test(totals: &[Complex64], n_electrons: u64) -> Result<(EnsembleStats, bool)> {
    gaussianity_test_with(totals, n_electrons, GaussianityThresholds::default())
}

pub fn gaussianity_test_with(
    totals: &[Complex64],
    n_electrons: u64,
    th: GaussianityThresholds,
) -> Result<(EnsembleStats, bool)> {
    if totals.len() < MIN_GAUSSIAN_TRIALS {
        return Err(Error::InsufficientTrials {
            required: MIN_GAUSSIAN_TRIALS,
            got: totals.len(),
        });
    }
    let s = EnsembleStats::from_totals(totals, n_electrons);
    let pass = s.skewness_re.abs() < th.max_abs_skewness
        && s.skewness_im.abs() < th.max_abs_skewness
        && s.excess_kurtosis_re.abs() < th.max_abs_excess_kurtosis
        && s.excess_kurtosis_im.abs() < th.max_abs_excess_kurtosis;
    Ok((s, pass))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplificationPoint {
    pub correlation: f64,
    pub median_total: f64,
    pub iqr: f64,
    /// Median relative to the first point of the sweep.
    pub amplification: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationCurve {
    pub points: Vec<AmplificationPoint>,
    /// Number of adjacent pairs where the median decreased.
    pub inversions: usize,
}

/// Median `|total|` for each correlation value, same seed for all.
pub fn correlation_amplification(
    sg: &SampleGeometry,
    leads: &LeadPlacement,
    model: &PerElectronModel,
    base: &EnsembleConfig,
    correlations: &[f64],
    trials: u64,
) -> Result<AmplificationCurve> {
    let ens = Ensemble::new(sg, leads, model);
    let mut points: Vec<AmplificationPoint> = Vec::with_capacity(correlations.len());
    for &c in correlations {
        let cfg = EnsembleConfig {
            correlation: c,
            ..*base
        };
        let mags: Vec<f64> = ens.trials(&cfg, trials)?.iter().map(|z| z.norm()).collect();
        let med = median(&mags);
        let reference = points.first().map_or(med, |p| p.median_total);
        points.push(AmplificationPoint {
            correlation: c,
            median_total: med,
            iqr: iqr(&mags),
            amplification: med / reference,
        });
    }
    let inversions = points
        .windows(2)
        .filter(|w| w[1].median_total < w[0].median_total)
        .count();
    Ok(AmplificationCurve { points, inversions })
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linear-interpolated quantile of sorted data.
fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let h = p * (v.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(v.len() - 1);
    v[i] + (h - i as f64) * (v[j] - v[i])
}

pub fn median(x: &[f64]) -> f64 {
    quantile_sorted(&sorted(x), 0.5)
}

pub fn iqr(x: &[f64]) -> f64 {
    let v = sorted(x);
    quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25)
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    (m, v)
}

fn central_moment(x: &[f64], m: f64, k: i32) -> f64 {
    x.iter().map(|v| (v - m).powi(k)).sum::<f64>() / x.len() as f64
}

/// Sample skewness `m3 / m2^{3/2}`.
pub fn skewness(x: &[f64]) -> f64 {
    let (m, v) = mean_var(x);
    central_moment(x, m, 3) / v.powf(1.5)
}

/// Sample excess kurtosis `m4 / m2^2 - 3`.
pub fn excess_kurtosis(x: &[f64]) -> f64 {
    let (m, v) = mean_var(x);
    central_moment(x, m, 4) / (v * v) - 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (SampleGeometry, LeadPlacement, PerElectronModel) {
        let sg = SampleGeometry::unit_cube();
        let leads = LeadPlacement::new([0.5, 0.5, -0.25], [0.5, 0.5, 1.25], 0.0);
        let model = PerElectronModel::Induced {
            kp: KineticParams::with_q0(0.05, 1.0, 1.0),
            e_charge: 1.0,
        };
        (sg, leads, model)
    }

    #[test]
    fn moments_of_small_sets() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!((iqr(&[1.0, 2.0, 3.0, 4.0, 5.0]) - 2.0).abs() < 1e-15);
        assert!(skewness(&[1.0, 2.0, 3.0]).abs() < 1e-15);
        // two-point distribution has excess kurtosis -2
        assert!((excess_kurtosis(&[-1.0, 1.0, -1.0, 1.0]) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_electron_total_is_its_magnitude() {
        let (sg, leads, model) = setup();
        let cfg = EnsembleConfig::new(1, 1.0, 1000.0, 5);
        let ens = Ensemble::new(&sg, &leads, &model);
        let e = ens.electrons(&cfg, 0).unwrap()[0];
        let m = ens.magnitude(e.x0, 1.0).unwrap().abs();
        let t = ensemble_total(&sg, &leads, &model, &cfg).unwrap();
        assert!(((t.total.norm() - m) / m).abs() < 1e-12);
        assert!(!t.phase_underwrap);
    }

    #[test]
    fn full_correlation_is_coherent() {
        let (sg, leads, model) = setup();
        let mut cfg = EnsembleConfig::new(200, 1.0, 1000.0, 9);
        cfg.correlation = 1.0;
        let ens = Ensemble::new(&sg, &leads, &model);
        let el = ens.electrons(&cfg, 0).unwrap();
        let sum_abs: f64 = el.iter().map(|e| e.amplitude.re.hypot(e.amplitude.im)).sum();
        let signed: f64 = el.iter().map(|e| ens.magnitude(e.x0, 1.0).unwrap()).sum();
        let total = ens.total(&cfg, 0).unwrap();
        assert!(((total.norm() - signed.abs()) / signed.abs()).abs() < 1e-12);
        assert!(total.norm() <= sum_abs * (1.0 + 1e-12));
    }

    #[test]
    fn underwrap_flag() {
        assert!(EnsembleConfig::new(1, 1.0, 100.0, 0).phase_underwrap());
        assert!(!EnsembleConfig::new(1, 1.0, 200.0 * PI, 0).phase_underwrap());
    }

    #[test]
    fn gaussianity_needs_enough_trials() {
        let z = vec![Complex64::new(0.0, 0.0); 10];
        assert!(matches!(
            gaussianity_test(&z, 1),
            Err(Error::InsufficientTrials {
                required: 1000,
                got: 10
            })
        ));
    }

    #[test]
    fn bad_correlation_is_rejected() {
        let (sg, leads, model) = setup();
        let mut cfg = EnsembleConfig::new(10, 1.0, 1000.0, 0);
        cfg.correlation = 1.5;
        assert!(ensemble_total(&sg, &leads, &model, &cfg).is_err());
    }
}
