//! Browser bindings for the demo page in `www/`. Every function returns a
//! flat `Float64Array`; the layout is given per function.

use qfnoise::connected::log_grid;
use qfnoise::distribution::MomentumDistribution;
use qfnoise::kinetic::{delta_k_closed, delta_k_exact, kinetic_solution, KineticParams};
use qfnoise::observation::ObservationGeometry;
use qfnoise::SpectrumEvaluator;
use wasm_bindgen::prelude::*;

fn spectrum_points(r_dtilde: f64, chi: f64, points: usize) -> qfnoise::Result<Vec<f64>> {
    let ev = SpectrumEvaluator::new(MomentumDistribution::fermi_step(1.0)?, 1.0)?;
    let r = r_dtilde / ev.dtilde();
    let w0 = ev.omega0(r);
    let g = ObservationGeometry::from_polar(r, chi, r)?;
    let mut out = Vec::with_capacity(3 * points);
    for x in log_grid(1e-4, 1e-1, points) {
        let w = x * w0;
        out.extend([x, ev.exact_i2(&g, w)?.magnitude, ev.asymptotic_i22(&g, w)?.magnitude]);
    }
    Ok(out)
}

fn slice_points(q0_over_qf: f64, width: f64, n: usize) -> qfnoise::Result<Vec<f64>> {
    let d0 = if width > 0.0 {
        MomentumDistribution::fermi_smeared(1.0, width)?
    } else {
        MomentumDistribution::fermi_step(1.0)?
    };
    let kp = KineticParams::with_q0(q0_over_qf, 1.0, d0.value_at_zero());
    let scale = d0.value_at_zero();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let q_z = 1.5 - 3.0 * (j as f64 + 0.5) / n as f64;
        for i in 0..n {
            let q_perp = 1.5 * (i as f64 + 0.5) / n as f64;
            out.push(kinetic_solution(&d0, &kp, q_perp, q_z)? / scale);
        }
    }
    Ok(out)
}

fn delta_k_points(chi: f64, points: usize) -> qfnoise::Result<Vec<f64>> {
    let d0 = MomentumDistribution::fermi_step(1.0)?;
    let rho0 = d0.value_at_zero();
    let mut out = Vec::with_capacity(3 * points);
    for x in log_grid(1e-3, 0.3, points) {
        let kp = KineticParams::with_q0(x, 1.0, rho0);
        out.extend([
            x,
            delta_k_exact(&d0, &kp, chi)?.abs(),
            delta_k_closed(&kp, chi, rho0).value.abs(),
        ]);
    }
    Ok(out)
}

fn js(e: qfnoise::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Triples `(omega / omega0, |I| exact, |I| asymptote)` for a Fermi step at
/// distance `r D~ = r_dtilde` and angle `chi`.
#[wasm_bindgen]
pub fn spectrum_curve(r_dtilde: f64, chi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    spectrum_points(r_dtilde, chi, points).map_err(js)
}

/// `n x n` field-shifted density over `q_perp in [0, 1.5]` (columns) and
/// `q_z` from 1.5 down to -1.5 (rows), relative to `rho_0(0)`. A zero
/// `width` selects the sharp step.
#[wasm_bindgen]
pub fn kinetic_slice(q0_over_qf: f64, width: f64, n: usize) -> Result<Vec<f64>, JsError> {
    slice_points(q0_over_qf, width, n).map_err(js)
}

/// Triples `(q0 / q_F, |Delta K| exact, |Delta K| closed form)`.
#[wasm_bindgen]
pub fn delta_k_curve(chi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    delta_k_points(chi, points).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_layout() {
        let v = spectrum_points(100.0, 0.5, 4).unwrap();
        assert_eq!(v.len(), 12);
        assert!((v[0] - 1e-4).abs() < 1e-18);
        // the asymptote falls as 1/omega over three decades
        assert!((v[2] / v[11] - 1e3).abs() < 1e-6);
    }

    #[test]
    fn slice_is_shifted_against_the_field() {
        let n = 16;
        let v = slice_points(0.2, 0.05, n).unwrap();
        assert_eq!(v.len(), n * n);
        // first column, top (q_z > 0) vs bottom (q_z < 0) rows near the surface
        let top = v[n];
        let bottom = v[(n - 2) * n];
        assert!(top != bottom);
        assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
    }

    #[test]
    fn delta_k_closed_tracks_exact_at_weak_field() {
        let v = delta_k_points(1.0, 5).unwrap();
        assert!(((v[1] - v[2]) / v[1]).abs() < 1e-6);
    }
}
