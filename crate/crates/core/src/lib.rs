//! Stability and metastability of a harmonically trapped condensate with a
//! contact interaction, in one, two and three dimensions.
//!
//! The energy functional is minimized two independent ways:
//!
//! * [`variational`]: closed-form analysis on normalized Gaussians, giving
//!   stationary widths, classification, critical couplings and barriers;
//! * [`gpesolve`]: ansatz-free normalized gradient flow on a radial grid,
//!   with operational collapse detection and a bisection for the grid
//!   threshold.
//!
//! [`units`] maps SI trap parameters onto the dimensionless coupling `g` and
//! back to atom numbers; [`sweep`] batches both engines over coupling grids.

pub mod energy;
pub mod error;
pub mod gpesolve;
mod numeric;
pub mod sweep;
pub mod units;
pub mod variational;

pub use energy::EnergyBreakdown;
pub use error::{Error, Result};
pub use units::{Coupling, Dimension, PhysicalSystem};
pub use variational::{AnsatzProblem, Classification, StabilityReport, VariationalPoint};
