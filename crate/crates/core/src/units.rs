//! Unit handling.
//!
//! All computation happens in natural units (hbar = c = 1, Heaviside-Lorentz
//! charge) where every quantity is a power of one reference momentum `q_ref`.
//! SI values only appear at the boundary. A quantity's SI value is
//! `natural * q_ref^q * hbar^h * c^c` for its [`Dimension`] exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR_SI: f64 = 1.054_571_817e-34;
pub const C_SI: f64 = 299_792_458.0;
pub const E_CHARGE_SI: f64 = 1.602_176_634e-19;
pub const EPSILON0_SI: f64 = 8.854_187_812_8e-12;

/// Exponents of (reference momentum, hbar, c) carried by a quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension {
    pub momentum: i32,
    pub hbar: i32,
    pub c: i32,
}

impl Dimension {
    pub const fn new(momentum: i32, hbar: i32, c: i32) -> Self {
        Self { momentum, hbar, c }
    }

    pub const DIMENSIONLESS: Dimension = Dimension::new(0, 0, 0);
    pub const MOMENTUM: Dimension = Dimension::new(1, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(-1, 1, 0);
    pub const TIME: Dimension = Dimension::new(-1, 1, -1);
    pub const MASS: Dimension = Dimension::new(1, 0, -1);
    pub const FREQUENCY: Dimension = Dimension::new(1, -1, 1);
    pub const ENERGY: Dimension = Dimension::new(1, 0, 1);
    /// Momentum-space density normalized with d^3q/(2 pi hbar)^3.
    pub const MOMENTUM_DENSITY: Dimension = Dimension::new(-3, 3, 0);
    /// The mean-field transform |I~(r, omega)| (time times wavenumber).
    pub const TRANSFORM: Dimension = Dimension::new(0, 0, -1);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub mode: UnitMode,
    /// Reference momentum in kg m/s (SI) that maps to 1 in natural units.
    pub q_ref: f64,
    pub hbar: f64,
    pub c: f64,
    /// Elementary charge in coulomb.
    pub e_charge: f64,
    pub epsilon0: f64,
}

impl UnitSystem {
    /// Natural units with the given reference momentum (SI value, used only
    /// when converting).
    pub fn natural(q_ref: f64) -> Self {
        Self {
            mode: UnitMode::Natural,
            q_ref,
            hbar: HBAR_SI,
            c: C_SI,
            e_charge: E_CHARGE_SI,
            epsilon0: EPSILON0_SI,
        }
    }

    pub fn si(q_ref: f64) -> Self {
        Self {
            mode: UnitMode::Si,
            ..Self::natural(q_ref)
        }
    }

    fn factor(&self, dim: Dimension) -> f64 {
        self.q_ref.powi(dim.momentum) * self.hbar.powi(dim.hbar) * self.c.powi(dim.c)
    }

    pub fn to_si(&self, natural: f64, dim: Dimension) -> f64 {
        natural * self.factor(dim)
    }

    pub fn to_natural(&self, si: f64, dim: Dimension) -> f64 {
        si / self.factor(dim)
    }

    /// Heaviside-Lorentz charge squared, `e^2 / epsilon0`, in J m.
    pub fn e_hl_squared(&self) -> f64 {
        self.e_charge * self.e_charge / self.epsilon0
    }

    /// The natural-units elementary charge, sqrt(4 pi alpha).
    pub fn e_natural(&self) -> f64 {
        (self.e_hl_squared() / (self.hbar * self.c)).sqrt()
    }

    pub fn require_si(&self) -> Result<()> {
        match self.mode {
            UnitMode::Si => Ok(()),
            UnitMode::Natural => Err(Error::Unit(
                "operation needs SI conversion constants; natural mode is active".into(),
            )),
        }
    }
}
