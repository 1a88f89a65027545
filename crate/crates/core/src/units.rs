//! Physical parameters and the dimensionless coupling.
//!
//! Everything downstream works in oscillator units: lengths in
//! `a_ho = sqrt(ħ/(m ω))`, energies in `ħω`. In three dimensions the contact
//! strength `B = 4πħ² a_s / m` times the atom number `N` becomes the single
//! coupling `g = 4π N a_s / a_ho`. In one and two dimensions the reduction of a
//! contact interaction depends on how the transverse directions are frozen
//! out, so `g` is taken as a primitive input there.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s (1.054572e-34).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit in kg (1.660539e-27).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Spatial dimension of the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::One, Dimension::Two, Dimension::Three];

    pub fn get(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.get())
    }

    /// Surface measure of the unit sphere: 2, 2π, 4π.
    pub fn sphere_measure(self) -> f64 {
        match self {
            Dimension::One => 2.0,
            Dimension::Two => 2.0 * PI,
            Dimension::Three => 4.0 * PI,
        }
    }
}

impl TryFrom<u8> for Dimension {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(Error::InvalidDimension(f64::from(other))),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// Trap and atom parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSystem {
    /// Atomic mass in kg.
    mass: f64,
    /// Angular trap frequency in rad/s.
    trap_frequency: f64,
    /// s-wave scattering length in m; negative is attractive.
    scattering_length: f64,
    atom_count: u64,
}

impl PhysicalSystem {
    pub fn new(mass: f64, trap_frequency: f64, scattering_length: f64, atom_count: u64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidSystem(format!("mass must be positive, got {mass}")));
        }
        if !(trap_frequency.is_finite() && trap_frequency > 0.0) {
            return Err(Error::InvalidSystem(format!(
                "trap frequency must be positive, got {trap_frequency}"
            )));
        }
        if !scattering_length.is_finite() {
            return Err(Error::InvalidSystem("scattering length must be finite".into()));
        }
        if atom_count == 0 {
            return Err(Error::InvalidSystem("atom count must be at least 1".into()));
        }
        Ok(Self {
            mass,
            trap_frequency,
            scattering_length,
            atom_count,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn trap_frequency(&self) -> f64 {
        self.trap_frequency
    }

    pub fn scattering_length(&self) -> f64 {
        self.scattering_length
    }

    pub fn atom_count(&self) -> u64 {
        self.atom_count
    }

    /// Same trap and species with a different atom number.
    pub fn with_atom_count(&self, atom_count: u64) -> Result<Self> {
        Self::new(self.mass, self.trap_frequency, self.scattering_length, atom_count)
    }
}

/// Dimensionless coupling `g` in a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub g: f64,
    pub dimension: Dimension,
}

impl Coupling {
    pub fn new(g: f64, dimension: Dimension) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::NonFiniteCoupling(g));
        }
        Ok(Self { g, dimension })
    }
}

/// Harmonic oscillator length `sqrt(ħ/(m ω))` in metres.
pub fn oscillator_length(system: &PhysicalSystem) -> f64 {
    (HBAR / (system.mass * system.trap_frequency)).sqrt()
}

/// `g = 4π N a_s / a_ho`. Only three dimensions have a physical definition.
pub fn coupling_from_physical(system: &PhysicalSystem, dimension: Dimension) -> Result<Coupling> {
    if dimension != Dimension::Three {
        return Err(Error::PhysicalCouplingRequires3d(dimension.get()));
    }
    let g = 4.0 * PI * system.atom_count as f64 * system.scattering_length / oscillator_length(system);
    Coupling::new(g, dimension)
}

/// Atom number at which the 3D coupling reaches `g_critical`:
/// `N_c = |g_c| a_ho / (4π |a_s|)`. Callers floor it for reporting.
pub fn critical_atom_number(system: &PhysicalSystem, g_critical: f64) -> Result<f64> {
    atoms_for_coupling(g_critical, oscillator_length(system), system.scattering_length)
}

/// Length-level form of [`critical_atom_number`], for callers that already
/// know `a_ho`.
pub fn atoms_for_coupling(g_critical: f64, oscillator_length: f64, scattering_length: f64) -> Result<f64> {
    if scattering_length.is_nan() || scattering_length >= 0.0 {
        return Err(Error::NotAttractive(scattering_length));
    }
    if g_critical.is_nan() || g_critical >= 0.0 {
        return Err(Error::NonNegativeCritical(g_critical));
    }
    Ok(g_critical.abs() * oscillator_length / (4.0 * PI * scattering_length.abs()))
}
