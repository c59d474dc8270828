mod common;

use std::f64::consts::PI;

use common::{composite, rel};
use qfnoise::distribution::{FieldAxis, MomentumDistribution};
use qfnoise::fit::log_log_slope;
use qfnoise::kinetic::{
    delta_k_closed, delta_k_exact, exponential_allowance, induced_c00, keq_residual, kinetic_distribution,
    kinetic_solution, zero_field_c00_reference, KineticParams,
};
use qfnoise::observation::ObservationGeometry;
use qfnoise::Tolerance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

fn step() -> MomentumDistribution {
    MomentumDistribution::fermi_step(1.0).unwrap()
}

fn params(d0: &MomentumDistribution, q0: f64) -> KineticParams {
    KineticParams::with_q0(q0, 1.0, d0.value_at_zero())
}

/// Defining integral of the solution by composite Gauss-Legendre.
fn solution_oracle(d0: &MomentumDistribution, q0: f64, q_perp: f64, q_z: f64, upper: f64) -> f64 {
    let f = |xi: f64| (-(xi - q_z) / q0).exp() * d0.radial(q_perp.hypot(xi));
    composite(f, q_z, upper, 400, 12) / q0
}

#[test]
fn solution_at_origin_matches_defining_integral() {
    let d0 = step();
    let q0 = 0.2;
    let got = kinetic_solution(&d0, &params(&d0, q0), 0.0, 0.0).unwrap();
    let oracle = solution_oracle(&d0, q0, 0.0, 0.0, 1.0);
    assert!(rel(got, oracle) < 1e-12, "{got} vs {oracle}");
    assert!(rel(got, d0.value_at_zero() * (1.0 - (-1.0f64 / q0).exp())) < 1e-14);
}

#[test]
fn smeared_solution_matches_defining_integral() {
    let d0 = MomentumDistribution::fermi_smeared(1.0, 0.05).unwrap();
    let kp = params(&d0, 0.1);
    for (qp, qz) in [(0.0, 0.0), (0.5, -0.9), (0.9, 0.3), (0.2, -1.3)] {
        let got = kinetic_solution(&d0, &kp, qp, qz).unwrap();
        let oracle = solution_oracle(&d0, 0.1, qp, qz, qz.max(0.0) + 8.0);
        assert!(rel(got, oracle) < 1e-9, "({qp}, {qz}): {got} vs {oracle}");
    }
}

#[test]
fn solution_preserves_normalization() {
    for d0 in [step(), MomentumDistribution::fermi_smeared(1.0, 0.05).unwrap()] {
        let d = kinetic_distribution(&d0, &params(&d0, 0.1)).unwrap();
        let n = d.moment_3d(0, Tolerance::new(1e-300, 1e-10)).unwrap();
        assert!((n - 1.0).abs() < 1e-6, "{n}");
    }
}

#[test]
fn weak_field_limit_recovers_equilibrium() {
    let d0 = step();
    let kp = params(&d0, 1e-4);
    for i in 0..8 {
        for j in 0..8 {
            let (qp, qz) = (0.1 * i as f64, -0.7 + 0.2 * j as f64);
            if qp.hypot(qz) > 0.9 {
                continue;
            }
            let v = kinetic_solution(&d0, &kp, qp, qz).unwrap();
            assert!(rel(v, d0.value_at_zero()) < 1e-3);
        }
    }
    let smooth = MomentumDistribution::fermi_smeared(1.0, 0.2).unwrap();
    let kp = params(&smooth, 1e-4);
    for (qp, qz) in [(0.0, 0.0), (0.6, 0.7), (1.1, -0.2)] {
        let v = kinetic_solution(&smooth, &kp, qp, qz).unwrap();
        assert!(rel(v, smooth.radial(qp.hypot(qz))) < 1e-3);
    }
}

#[test]
fn kinetic_equation_residual_on_grid() {
    let d0 = MomentumDistribution::fermi_smeared(1.0, 0.05).unwrap();
    let kp = params(&d0, 0.1);
    let scale = d0.value_at_zero();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        for j in 0..20 {
            let qp = 1.4 * (i as f64 + 0.5) / 20.0;
            let qz = -1.4 + 2.8 * (j as f64 + 0.5) / 20.0;
            let res = keq_residual(&d0, &kp, qp, qz, 2e-4).unwrap();
            worst = worst.max(res.abs() / scale);
        }
    }
    assert!(worst < 1e-6, "worst residual {worst:e}");
}

#[test]
fn delta_k_matches_monte_carlo_of_the_unreduced_integral() {
    // Delta K = int dphi int dq q [rho(q, theta(phi)) - rho_0(q)], with the
    // solution written as an expectation over xi ~ Exp(1/q0):
    // rho(q_perp, q_z) = E[rho_0(sqrt(q_perp^2 + (q_z + xi)^2))].
    let d0 = step();
    let q0 = 0.1;
    let chi = PI / 3.0;
    let (sc, cc) = chi.sin_cos();
    let q_max = 1.0 + 15.0 * q0;
    let exp = Exp::new(1.0 / q0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 8_000_000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let phi = PI * (rng.gen::<f64>() - 0.5);
        let q = q_max * rng.gen::<f64>();
        let xi: f64 = exp.sample(&mut rng);
        let u = cc * phi.sin();
        let (qz, qp) = (q * u, q * (1.0 - u * u).sqrt());
        let shifted = d0.radial(qp.hypot(qz + xi));
        let f = PI * q_max * q * (shifted - d0.radial(q));
        s += f;
        s2 += f * f;
    }
    let mean = s / n as f64;
    let err = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    let kp = params(&d0, q0);
    let exact = delta_k_exact(&d0, &kp, chi).unwrap();
    assert!((mean - exact).abs() < 4.0 * err, "MC {mean} +- {err} vs {exact}");
    assert!(err < 0.02 * exact.abs(), "{err} {exact}");
    let _ = sc;
}

#[test]
fn delta_k_closed_form_within_allowance() {
    let d0 = step();
    let chi = PI / 3.0;
    for r in [0.01, 0.05, 0.1] {
        let kp = params(&d0, r);
        let exact = delta_k_exact(&d0, &kp, chi).unwrap();
        let closed = delta_k_closed(&kp, chi, kp.rho0_at_zero);
        assert!(closed.within_validity);
        let tol = 0.005 + exponential_allowance(&kp, chi);
        assert!(rel(closed.value, exact) < tol, "q0={r}");
    }
    let kp = params(&d0, 0.05);
    let exact = delta_k_exact(&d0, &kp, PI / 4.0).unwrap();
    let closed = delta_k_closed(&kp, PI / 4.0, kp.rho0_at_zero).value;
    assert!(rel(closed, exact) < 0.005f64.max(exponential_allowance(&kp, PI / 4.0)));
}

#[test]
fn delta_k_exact_has_known_step_form() {
    // for a step, -pi sin^2 chi rho q0^2 (1 - (1 + X) e^{-X}), X = q_F/(q0 sin chi)
    let d0 = step();
    for (q0, chi) in [(0.3, 1.0f64), (0.05, 0.2), (1.5, 1.4)] {
        let kp = params(&d0, q0);
        let x = 1.0 / (q0 * chi.sin());
        let expect = -PI * chi.sin().powi(2) * d0.value_at_zero() * q0 * q0 * (1.0 - (1.0 + x) * (-x).exp());
        assert!(rel(delta_k_exact(&d0, &kp, chi).unwrap(), expect) < 1e-9);
    }
}

#[test]
fn quadratic_field_law() {
    let d0 = step();
    let q0s: Vec<f64> = (0..9).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
    let dk: Vec<f64> = q0s
        .iter()
        .map(|&q| delta_k_exact(&d0, &params(&d0, q), PI / 3.0).unwrap().abs())
        .collect();
    let slope = log_log_slope(&q0s, &dk).unwrap();
    assert!((slope - 2.0).abs() < 0.02, "{slope}");
    assert!(dk.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn exponential_corrections_shrink_geometrically() {
    let d0 = step();
    // relative corrections (1 + X) e^{-X} with X = q_F / q0 at chi = pi/2
    let chi = 0.5 * PI;
    let diffs: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|ratio| {
            let kp = params(&d0, 1.0 / ratio);
            let e = delta_k_exact(&d0, &kp, chi).unwrap();
            let c = delta_k_closed(&kp, chi, kp.rho0_at_zero).value;
            ((e - c) / c).abs()
        })
        .collect();
    assert!(diffs[1] < 0.5 * diffs[0] && diffs[2] < 0.5 * diffs[1], "{diffs:?}");
}

#[test]
fn pipeline_difference_reproduces_induced_noise() {
    let d0 = step();
    let kp = params(&d0, 0.05);
    let e = 0.3;
    let omega = 1e-7;
    for chi in [PI / 4.0, PI / 3.0] {
        let g = ObservationGeometry::from_polar(2000.0, chi, 1800.0).unwrap();
        let kin = qfnoise::SpectrumEvaluator::new(kinetic_distribution(&d0, &kp).unwrap(), 1.0).unwrap();
        let zero = qfnoise::SpectrumEvaluator::new(d0.clone(), 1.0).unwrap();
        let diff = kin.c00_single_electron(&g, omega, e).unwrap().magnitude
            - zero.c00_single_electron(&g, omega, e).unwrap().magnitude;
        let res = induced_c00(&d0, &kp, &g, omega, e).unwrap();
        assert!(rel(diff.abs(), res.delta_c00) < 0.01, "{diff} vs {}", res.delta_c00);
        assert!(diff < 0.0);
    }
}

#[test]
fn induced_ratio_is_of_order_q0_over_qf_squared() {
    let d0 = step();
    let kp = params(&d0, 0.05);
    let g = ObservationGeometry::new([0.0, 0.0, 500.0], [500.0, 0.0, 0.0], [0.0; 3]).unwrap();
    let res = induced_c00(&d0, &kp, &g, 1e-7, 0.3).unwrap();
    let order = 0.05f64.powi(2);
    assert!(res.relative_to_zero_field < 3.0 * order && res.relative_to_zero_field > order / 3.0);
    assert!(rel(res.relative_to_zero_field, 2.0 * order) < 1e-9);
}

#[test]
fn zero_field_reference_for_step() {
    let d0 = MomentumDistribution::fermi_step(2.0).unwrap();
    let g = ObservationGeometry::from_polar(100.0, 0.5, 120.0).unwrap();
    let e = 0.3;
    let c = zero_field_c00_reference(&d0, &g, 1e-6, e, 1.0).unwrap().magnitude;
    let expect = e * e / (32.0 * PI.powi(4) * 1e4 * 120.0 * 1e-6) * (3.0 * PI * PI / 2.0);
    assert!(rel(c, expect) < 1e-12);
    let far = ObservationGeometry::from_polar(200.0, 0.5, 120.0).unwrap();
    let c2 = zero_field_c00_reference(&d0, &far, 1e-6, e, 1.0).unwrap().magnitude;
    assert!(rel(c / c2, 4.0) < 1e-12);
}

#[test]
fn mirrored_field_gives_mirrored_induced_noise() {
    let d0 = step();
    let mut kp = params(&d0, 0.08);
    let up = kinetic_distribution(&d0, &kp).unwrap();
    kp.field = -kp.field;
    let down = kinetic_distribution(&d0, &kp).unwrap();
    let a = qfnoise::SpectrumEvaluator::new(up, 1.0)
        .unwrap()
        .angular_q_integral(0.6)
        .unwrap()
        .value;
    let b = qfnoise::SpectrumEvaluator::new(down, 1.0)
        .unwrap()
        .angular_q_integral(0.6)
        .unwrap()
        .value;
    assert!(rel(a, b) < 1e-10);
    let _ = FieldAxis::PlusZ;
}
