use serde::{Deserialize, Serialize};

/// Energy per particle in units of `ħω`, split into the three terms of the
/// functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, potential: f64, interaction: f64) -> Self {
        Self {
            kinetic,
            potential,
            interaction,
            total: kinetic + potential + interaction,
        }
    }

    /// `2T − 2V + d·E_int`, zero at every stationary point of the functional
    /// in a harmonic trap.
    pub fn virial_residual(&self, dimension: f64) -> f64 {
        2.0 * self.kinetic - 2.0 * self.potential + dimension * self.interaction
    }

    /// `μ = T + V + 2 E_int`: the interaction term is quadratic in density.
    pub fn chemical_potential(&self) -> f64 {
        self.total + self.interaction
    }
}
