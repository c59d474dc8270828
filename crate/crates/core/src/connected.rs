//! Logarithmic low-frequency behavior of the connected part.
//!
//! The kernel is the scalar reduction of the Schwinger-parametrized loop:
//! `K(omega) = s * int_0^inf dy / ([(omega - p0)^2 - p^2 - 2 omega y (q.p)]
//! * sqrt(y^2 q^2 + 1 + y (omega + 2m)))`, with the tensor factor dropped and
//! all constant bookkeeping folded into `kernel_scale` (default `1/(2 pi)`).
//! Its large-`y` tail gives `K ~ a ln(1/omega)` with
//! `a = kernel_scale / (|q| ((p0)^2 - p^2))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::observation::Vec3;
use crate::quad::{self, Tolerance};

/// Decades of `e^t` integrated past the denominator's crossover.
const TAIL_E_FOLDS: f64 = 35.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectedProbe {
    /// Particle 3-momentum.
    pub q: Vec3,
    /// Energy component of the momentum transfer.
    pub p0: f64,
    /// Spatial momentum transfer.
    pub p: Vec3,
    pub mass: f64,
    #[serde(default = "default_scale")]
    pub kernel_scale: f64,
}

fn default_scale() -> f64 {
    1.0 / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectedFit {
    pub coefficient: f64,
    pub intercept: f64,
    /// Largest fit residual relative to the largest `a ln(1/omega)` term.
    pub residual: f64,
    pub predicted: f64,
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl ConnectedProbe {
    pub fn new(q: Vec3, p0: f64, p: Vec3, mass: f64) -> Self {
        Self {
            q,
            p0,
            p,
            mass,
            kernel_scale: default_scale(),
        }
    }

    fn q_norm(&self) -> f64 {
        dot(self.q, self.q).sqrt()
    }

    fn delta(&self, omega: f64) -> f64 {
        (omega - self.p0).powi(2) - dot(self.p, self.p)
    }

    /// `a_pred = kernel_scale / (|q| ((p0)^2 - p^2))`.
    pub fn predicted_coefficient(&self) -> f64 {
        self.kernel_scale / (self.q_norm() * self.delta(0.0))
    }

    /// Fails with `PoleOnContour` if the denominator vanishes at some `y >= 0`.
    pub fn check_pole_free(&self, omega: f64) -> Result<()> {
        let delta = self.delta(omega);
        let s = dot(self.q, self.p);
        let slope = 2.0 * omega * s;
        if delta == 0.0 {
            return Err(Error::PoleOnContour { omega, y: 0.0 });
        }
        if slope != 0.0 {
            let y = delta / slope;
            if y >= 0.0 {
                return Err(Error::PoleOnContour { omega, y });
            }
        }
        Ok(())
    }

    pub fn kernel(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if !(self.mass > 0.0) || self.q_norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "probe needs positive mass and nonzero q".into(),
            ));
        }
        self.check_pole_free(omega)?;
        let delta = self.delta(omega);
        let s = dot(self.q, self.p);
        let q2 = dot(self.q, self.q);
        let b = omega + 2.0 * self.mass;
        let f = |y: f64| 1.0 / ((delta - 2.0 * omega * y * s) * (y * y * q2 + 1.0 + y * b).sqrt());
        let tol = Tolerance::new(1e-300, 1e-12);
        let head = quad::integrate(f, 0.0, 1.0, tol)?;
        // y = e^t on [1, inf), past the crossover where the linear term takes over
        let t_cross = if s != 0.0 {
            (delta.abs() / (2.0 * omega * s.abs())).ln().max(0.0)
        } else {
            0.0
        };
        let t_end = t_cross + TAIL_E_FOLDS;
        let mut pts = vec![0.0];
        if t_cross > 0.0 {
            pts.push(t_cross);
        }
        pts.push(t_end);
        let tail = quad::integrate_with_breaks(
            |t| {
                let y = t.exp();
                y * f(y)
            },
            &pts,
            tol,
        )?;
        Ok(self.kernel_scale * (head.value + tail.value))
    }
}

/// Fits `K(omega) = a ln(1/omega) + b` over the grid and compares `a` with the
/// prediction. Grids spanning less than two decades fail.
pub fn connected_log_coefficient(probe: &ConnectedProbe, omega_grid: &[f64]) -> Result<ConnectedFit> {
    connected_log_coefficient_with(probe, omega_grid, 1e-2)
}

pub fn connected_log_coefficient_with(
    probe: &ConnectedProbe,
    omega_grid: &[f64],
    max_residual: f64,
) -> Result<ConnectedFit> {
    if omega_grid.len() < 3 {
        return Err(Error::FitFailure("need at least three frequencies".into()));
    }
    let lo = omega_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = omega_grid.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || (hi / lo).log10() < 2.0 - 1e-9 {
        return Err(Error::FitFailure(format!(
            "frequency grid spans {:.3} decades, need at least 2",
            (hi / lo).log10()
        )));
    }
    for &w in omega_grid {
        probe.check_pole_free(w)?;
    }
    let x: Vec<f64> = omega_grid.iter().map(|w| (1.0 / w).ln()).collect();
    let y = omega_grid
        .iter()
        .map(|&w| probe.kernel(w))
        .collect::<Result<Vec<_>>>()?;
    let fit = linear_fit(&x, &y)?;
    let term = x.iter().map(|v| (fit.slope * v).abs()).fold(0.0, f64::max);
    let residual = fit.max_residual / term;
    if !(residual < max_residual) {
        return Err(Error::FitFailure(format!(
            "fit residual {residual:e} exceeds {max_residual:e}"
        )));
    }
    Ok(ConnectedFit {
        coefficient: fit.slope,
        intercept: fit.intercept,
        residual,
        predicted: probe.predicted_coefficient(),
    })
}

/// Log-spaced grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe() -> ConnectedProbe {
        ConnectedProbe::new([0.0, 0.6, 0.8], 0.01, [0.0, 0.0, 0.05], 1.0)
    }

    #[test]
    fn spacelike_probe_with_opposed_momenta_has_a_pole() {
        let p = ConnectedProbe::new([0.0, 0.6, 0.8], 0.01, [0.0, 0.0, -0.05], 1.0);
        assert!(matches!(p.kernel(1e-5), Err(Error::PoleOnContour { .. })));
    }

    #[test]
    fn one_decade_grid_fails() {
        let grid = log_grid(1e-5, 1e-4, 8);
        assert!(matches!(
            connected_log_coefficient(&probe(), &grid),
            Err(Error::FitFailure(_))
        ));
    }

    #[test]
    fn kernel_is_linear_in_scale() {
        let mut p = probe();
        let grid = log_grid(1e-6, 1e-4, 9);
        let a = connected_log_coefficient(&p, &grid).unwrap().coefficient;
        p.kernel_scale *= 3.0;
        let b = connected_log_coefficient(&p, &grid).unwrap().coefficient;
        assert!((b / a - 3.0).abs() < 1e-10);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-6, 1e-4, 5);
        assert!((g[0] - 1e-6).abs() < 1e-20 && (g[4] - 1e-4).abs() < 1e-18);
        assert!((g[2] - 1e-5).abs() < 1e-18);
    }
}
