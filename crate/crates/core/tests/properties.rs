use std::f64::consts::PI;

use proptest::prelude::*;
use qfnoise::distribution::MomentumDistribution;
use qfnoise::fit::log_log_slope;
use qfnoise::geometry::{g_integrand, BallRule, LeadPlacement};
use qfnoise::kinetic::{delta_k_closed, delta_k_exact, KineticParams};
use qfnoise::observation::ObservationGeometry;
use qfnoise::SpectrumEvaluator;

fn double_factorial(n: i64) -> f64 {
    if n <= 0 {
        1.0
    } else {
        n as f64 * double_factorial(n - 2)
    }
}

/// Mean of `x^a y^b z^c` over the unit ball.
fn ball_moment(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    let n = (a + b + c) as i64;
    let sphere = double_factorial(a as i64 - 1) * double_factorial(b as i64 - 1) * double_factorial(c as i64 - 1)
        / double_factorial(n + 1);
    3.0 / (n as f64 + 3.0) * sphere
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0..3.0f64)
}

#[test]
fn ball_rule_is_exact_to_degree_five() {
    let rule = BallRule::new();
    for a in 0..6u32 {
        for b in 0..6 - a {
            for c in 0..6 - a - b {
                let q: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                    .sum();
                assert!((q - ball_moment(a, b, c)).abs() < 1e-13, "x^{a} y^{b} z^{c}");
            }
        }
    }
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn lead_swap_leaves_integrand_unchanged(x0 in point(), a in point(), b in point(), r in 0.0..0.2f64) {
        let leads = LeadPlacement::new(a, b, r);
        let rule = BallRule::new();
        let f = g_integrand(x0, &leads, &rule, 1e-9);
        let g = g_integrand(x0, &leads.swapped(), &rule, 1e-9);
        prop_assert!((f - g).abs() <= 1e-12 * f.abs().max(1e-300));
    }

    #[test]
    fn integrand_scales_as_inverse_volume(x0 in point(), a in point(), b in point(), s in 0.1..20.0f64) {
        let leads = LeadPlacement::new(a, b, 0.05);
        let rule = BallRule::new();
        let f = g_integrand(x0, &leads, &rule, 0.0);
        prop_assume!(f.is_finite() && f != 0.0);
        let g = g_integrand(x0.map(|c| c * s), &leads.scaled(s), &rule, 0.0);
        prop_assert!((g * s.powi(3) / f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isotropic_asymptote_is_angle_independent(chi in 0.0..(PI / 2.0), q_f in 0.5..3.0f64, r in 50.0..500.0f64) {
        let ev = SpectrumEvaluator::new(MomentumDistribution::fermi_step(q_f).unwrap(), 1.0).unwrap();
        let g = ObservationGeometry::from_polar(r, chi, r).unwrap();
        let omega = 1e-6;
        let m = ev.asymptotic_i22(&g, omega).unwrap().magnitude;
        // angular integral pi * 3 pi^2 / q_F
        let expect = 3.0 * PI.powi(3) / q_f / (8.0 * PI.powi(4) * r * r * omega);
        prop_assert!((m / expect - 1.0).abs() < 1e-9);
    }

    #[test]
    fn asymptote_is_even_in_frequency_and_axial_offset(chi in 0.0..(PI / 2.0), omega in 1e-7..1e-4f64) {
        let ev = SpectrumEvaluator::new(MomentumDistribution::fermi_smeared(1.0, 0.1).unwrap(), 1.0).unwrap();
        let g = ObservationGeometry::from_polar(200.0, chi, 200.0).unwrap();
        let mirrored = ObservationGeometry::from_polar(200.0, -chi, 200.0).unwrap();
        let a = ev.asymptotic_i22(&g, omega).unwrap().magnitude;
        let b = ev.asymptotic_i22(&g, -omega).unwrap().magnitude;
        let c = ev.asymptotic_i22(&mirrored, omega).unwrap().magnitude;
        prop_assert!((a - b).abs() <= 1e-14 * a && (a - c).abs() <= 1e-12 * a);
    }

    #[test]
    fn log_log_slope_is_scale_free(p in -3.0..3.0f64, kx in 1e-3..1e3f64, ky in 1e-3..1e3f64) {
        let x: Vec<f64> = (0..6).map(|i| 10f64.powf(i as f64 * 0.5)).collect();
        let y: Vec<f64> = x.iter().map(|v| v.powf(p)).collect();
        let xs: Vec<f64> = x.iter().map(|v| v * kx).collect();
        let ys: Vec<f64> = y.iter().map(|v| v * ky).collect();
        let a = log_log_slope(&x, &y).unwrap();
        let b = log_log_slope(&xs, &ys).unwrap();
        prop_assert!((a - p).abs() < 1e-10 && (b - p).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn kinetic_correction_is_negative_and_grows_with_field(
        chi in 0.2..(PI / 2.0),
        q0 in 0.005..0.1f64,
        width in 0.02..0.1f64,
    ) {
        let d0 = MomentumDistribution::fermi_smeared(1.0, width).unwrap();
        let rho0 = d0.value_at_zero();
        let weak = KineticParams::with_q0(q0, 1.0, rho0);
        let strong = KineticParams::with_q0(1.5 * q0, 1.0, rho0);
        let a = delta_k_exact(&d0, &weak, chi).unwrap();
        let b = delta_k_exact(&d0, &strong, chi).unwrap();
        prop_assert!(a < 0.0 && b < a);
        let c = delta_k_closed(&weak, chi, rho0).value;
        prop_assert!(c < 0.0);
    }
}
