//! Low-frequency noise of the Coulomb field of quantum electrons.
//!
//! Everything runs in natural units (hbar = c = 1, Heaviside-Lorentz
//! charge); see [`units`] for conversion. The main entry points:
//!
//! * [`spectrum::SpectrumEvaluator`]: single-electron spectra, exact and
//!   asymptotic.
//! * [`kinetic`]: relaxation-time solution in a uniform field and the
//!   induced noise.
//! * [`geometry`]: the G-factor over a sample, total spectra, Hooge `alpha`.
//! * [`ensemble`]: many-electron phase sums.
//! * [`connected`]: the logarithmic connected-part check.

// NaN-rejecting checks are written as `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connected;
pub mod distribution;
pub mod ensemble;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod kinetic;
pub mod observation;
mod par;
pub mod quad;
pub mod spectrum;
pub mod units;

pub use distribution::{DistributionSpec, FieldAxis, MomentumDistribution};
pub use error::{Error, Result};
pub use observation::{ObservationGeometry, RegimeFlags, RegimeThresholds};
pub use quad::Tolerance;
pub use spectrum::{SpectrumEvaluator, SpectrumMethod, SpectrumResult};
