#![allow(dead_code)]

use num_complex::Complex64;
use qfnoise::quad::GaussLegendre;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Cosine integral `Ci(x)` for `x > 0`: power series below 2, continued
/// fraction for `E1(ix)` above.
pub fn ci(x: f64) -> f64 {
    assert!(x > 0.0);
    if x > 2.0 {
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1e300, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 2..200 {
            let a = -((i - 1) as f64).powi(2);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(x.cos(), -x.sin());
        -h.re
    } else {
        let (mut sum, mut sums, mut sumc) = (0.0f64, 0.0f64, 0.0f64);
        let (mut sign, mut fact) = (1.0f64, 1.0f64);
        let mut odd = true;
        for k in 1..200 {
            fact *= x / k as f64;
            let term = fact / k as f64;
            sum += sign * term;
            let err = term / sum.abs();
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if err < 1e-16 {
                break;
            }
            odd = !odd;
        }
        let _ = sums;
        sumc + x.ln() + EULER_GAMMA
    }
}

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gl(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let r = GaussLegendre::new(n);
    r.nodes()
        .iter()
        .zip(r.weights())
        .map(|(x, w)| (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w))
        .collect()
}

/// Composite Gauss-Legendre over `[a, b]` split into `panels` pieces.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            gl(n, a + h * k as f64, a + h * (k + 1) as f64)
                .into_iter()
                .map(|(x, w)| w * f(x))
                .sum::<f64>()
        })
        .sum()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn cosine_integral_reference_values() {
    // tabulated values
    assert!((ci(1.0) - 0.337_403_922_900_968_1).abs() < 1e-14);
    assert!((ci(5.0) + 0.190_029_749_656_643_9).abs() < 1e-13);
    assert!((ci(0.1) + 1.727_868_386_657_297).abs() < 1e-13);
    assert!((ci(20.0) - 0.044_419_820_845_353_3).abs() < 1e-13);
}
