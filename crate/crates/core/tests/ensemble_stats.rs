use std::f64::consts::PI;

use num_complex::Complex64;
use qfnoise::distribution::MomentumDistribution;
use qfnoise::ensemble::{
    correlation_amplification, gaussianity_test, Ensemble, EnsembleConfig, EnsembleStats, PerElectronModel,
};
use qfnoise::geometry::{LeadPlacement, SampleGeometry};
use qfnoise::kinetic::KineticParams;
use qfnoise::{SpectrumEvaluator, SpectrumMethod};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

fn setup() -> (SampleGeometry, LeadPlacement, PerElectronModel) {
    let sg = SampleGeometry::unit_cube();
    let leads = LeadPlacement::new([0.5, 0.5, -0.25], [0.5, 0.5, 1.25], 0.0);
    let model = PerElectronModel::Induced {
        kp: KineticParams::with_q0(0.05, 1.0, 6.0 * PI * PI),
        e_charge: 0.3,
    };
    (sg, leads, model)
}

fn cfg(n: u64) -> EnsembleConfig {
    EnsembleConfig::new(n, 1.0, 200.0 * PI, 7)
}

#[test]
fn synthetic_gaussian_totals_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = Normal::new(0.0, 2.5).unwrap();
    let z: Vec<Complex64> = (0..4000)
        .map(|_| Complex64::new(n.sample(&mut rng), n.sample(&mut rng)))
        .collect();
    let (stats, ok) = gaussianity_test(&z, 1).unwrap();
    assert!(ok, "{stats:?}");
    // |z| is Rayleigh: median = sigma sqrt(2 ln 2)
    let expected = 2.5 * (2.0 * 2f64.ln()).sqrt();
    assert!((stats.median_magnitude / expected - 1.0).abs() < 0.05);
}

#[test]
fn synthetic_heavy_tails_fail() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let e = Exp::new(1.0).unwrap();
    let z: Vec<Complex64> = (0..4000)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            let x: f64 = e.sample(&mut rng);
            Complex64::new(s * x * x, 0.1 * x)
        })
        .collect();
    assert!(!gaussianity_test(&z, 1).unwrap().1);
}

#[test]
fn too_few_trials_are_refused() {
    let z = vec![Complex64::new(1.0, 0.0); 999];
    assert!(gaussianity_test(&z, 1).is_err());
}

#[test]
fn two_electrons_are_not_gaussian() {
    let (sg, leads, model) = setup();
    let totals = Ensemble::new(&sg, &leads, &model).trials(&cfg(2), 1000).unwrap();
    let (stats, ok) = gaussianity_test(&totals, 2).unwrap();
    assert!(!ok, "{stats:?}");
}

#[test]
fn thousand_electrons_are_gaussian() {
    let (sg, leads, model) = setup();
    let totals = Ensemble::new(&sg, &leads, &model).trials(&cfg(1000), 1000).unwrap();
    let (stats, ok) = gaussianity_test(&totals, 1000).unwrap();
    assert!(ok, "{stats:?}");
}

#[test]
fn totals_are_quadratic_in_the_charge() {
    let (sg, leads, model) = setup();
    let PerElectronModel::Induced { kp, .. } = model else {
        unreachable!()
    };
    let scaled = PerElectronModel::Induced { kp, e_charge: 0.6 };
    let a = Ensemble::new(&sg, &leads, &model).trials(&cfg(50), 20).unwrap();
    let b = Ensemble::new(&sg, &leads, &scaled).trials(&cfg(50), 20).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((y / x - Complex64::new(4.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn totals_are_reproducible_and_thread_independent() {
    let (sg, leads, model) = setup();
    let ens = Ensemble::new(&sg, &leads, &model);
    let base = ens.trials(&cfg(200), 16).unwrap();
    for threads in [1, 3, 8] {
        let c = EnsembleConfig {
            threads: Some(threads),
            ..cfg(200)
        };
        assert_eq!(ens.trials(&c, 16).unwrap(), base);
    }
    let other = ens.trials(&EnsembleConfig { seed: 8, ..cfg(200) }, 16).unwrap();
    assert_ne!(other, base);
}

#[test]
fn coherent_emission_adds_magnitudes() {
    let (sg, leads, model) = setup();
    let ens = Ensemble::new(&sg, &leads, &model);
    let c = EnsembleConfig {
        correlation: 1.0,
        ..cfg(300)
    };
    let electrons = ens.electrons(&c, 3).unwrap();
    let t0 = electrons[0].t0;
    assert!(electrons.iter().all(|e| e.t0 == t0));
    let signed: f64 = electrons.iter().map(|e| ens.magnitude(e.x0, c.omega).unwrap()).sum();
    assert!((ens.total(&c, 3).unwrap().norm() / signed.abs() - 1.0).abs() < 1e-12);
}

#[test]
fn correlation_amplifies_monotonically() {
    let (sg, leads, model) = setup();
    let curve = correlation_amplification(&sg, &leads, &model, &cfg(1000), &[0.0, 0.25, 0.5, 1.0], 200).unwrap();
    assert_eq!(curve.inversions, 0);
    assert!(curve.points[3].amplification > 10.0, "{:?}", curve.points);
}

#[test]
fn disconnected_asymptotic_electrons_match_closed_form() {
    // step density: angular integral is 3 pi^3 / q_F, so
    // |C_00| = 3 e^2 / (32 pi^2 q_F r^2 r' omega)
    let q_f = 1.0;
    let s = 1e3;
    let sg = SampleGeometry::unit_cube().scaled(s);
    let leads = LeadPlacement::new([0.5 * s, 0.5 * s, -0.25 * s], [0.5 * s, 0.5 * s, 1.25 * s], 0.0);
    let ev = SpectrumEvaluator::new(MomentumDistribution::fermi_step(q_f).unwrap(), 1.0).unwrap();
    let e = 0.3;
    let model = PerElectronModel::Disconnected {
        evaluator: Box::new(ev),
        method: SpectrumMethod::AsymptoticI22,
        e_charge: e,
    };
    let ens = Ensemble::new(&sg, &leads, &model);
    let c = EnsembleConfig::new(100, 1e-6, 1e9, 4);
    let mut norms = Vec::new();
    for el in ens.electrons(&c, 0).unwrap() {
        let d =
            |p: [f64; 3]| ((p[0] - el.x0[0]).powi(2) + (p[1] - el.x0[1]).powi(2) + (p[2] - el.x0[2]).powi(2)).sqrt();
        let expect = 3.0 * e * e / (32.0 * PI * PI * q_f * d(leads.x_lead_a).powi(2) * d(leads.x_lead_b) * c.omega);
        assert!((el.amplitude.norm() / expect - 1.0).abs() < 1e-9);
        norms.push(el.amplitude);
    }
    let stats = EnsembleStats::from_totals(&norms, 1);
    assert!(stats.mean_magnitude > 0.0);
}
