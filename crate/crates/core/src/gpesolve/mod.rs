//! Ansatz-free minimization on a radial grid by normalized gradient flow.
//!
//! Each step moves ψ along `−Hψ` with `Hψ = −½(ψ'' + (d−1)/r·ψ') + ½r²ψ + gψ³`
//! and renormalizes. The default [`FlowScheme::SemiImplicit`] takes the linear
//! part at the new time level (one tridiagonal solve per step), which is
//! stable at any `τ`; [`FlowScheme::Explicit`] is the forward-Euler update and
//! is only accepted when `τ` is below its stability limit on the grid.
//!
//! Collapse is detected operationally: the rms radius dropping below a floor,
//! or the energy below a floor, ends the flow with [`Relaxation::Collapsed`].

mod operator;
mod profile;
mod threshold;

use serde::{Deserialize, Serialize};

use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::units::Dimension;

use operator::{RadialOperator, TridiagonalWork};

pub use profile::write_profile;
pub use threshold::{critical_coupling_grid, GridThreshold, Probe, ProbeOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FlowScheme {
    #[default]
    SemiImplicit,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Outer radius, where ψ = 0.
    pub r_max: f64,
    pub n_points: usize,
    pub time_step: f64,
    /// Converged once `|E_k − E_{k−1}| / τ` drops below this.
    pub energy_tol: f64,
    pub max_iters: usize,
    /// Defaults to three grid spacings.
    pub collapse_radius_floor: Option<f64>,
    /// Defaults to `−(10 + 10|g|)`.
    pub collapse_energy_floor: Option<f64>,
    pub scheme: FlowScheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r_max: 8.0,
            n_points: 1024,
            time_step: 1e-3,
            energy_tol: 1e-9,
            max_iters: 2_000_000,
            collapse_radius_floor: None,
            collapse_energy_floor: None,
            scheme: FlowScheme::SemiImplicit,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return bad(format!("r_max must be positive, got {}", self.r_max));
        }
        if self.n_points < 16 {
            return bad(format!("need at least 16 grid points, got {}", self.n_points));
        }
        if !(self.time_step.is_finite() && self.time_step > 0.0) {
            return bad(format!("time step must be positive, got {}", self.time_step));
        }
        if !(self.energy_tol.is_finite() && self.energy_tol > 0.0) {
            return bad(format!("energy tolerance must be positive, got {}", self.energy_tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if let Some(f) = self.collapse_radius_floor {
            if !(f.is_finite() && f >= 0.0) {
                return bad(format!("radius floor must be nonnegative, got {f}"));
            }
        }
        if let Some(f) = self.collapse_energy_floor {
            if !f.is_finite() {
                return bad(format!("energy floor must be finite, got {f}"));
            }
        }
        Ok(())
    }

    /// Grid spacing `h = r_max / (n − 1)`.
    pub fn spacing(&self) -> f64 {
        self.r_max / (self.n_points - 1) as f64
    }

    pub fn radius_floor(&self) -> f64 {
        self.collapse_radius_floor.unwrap_or(3.0 * self.spacing())
    }

    pub fn energy_floor(&self, coupling: f64) -> f64 {
        self.collapse_energy_floor.unwrap_or(-(10.0 + 10.0 * coupling.abs()))
    }
}

/// A radial profile on `r_i = i·h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub dimension: Dimension,
    pub coupling: f64,
    pub spacing: f64,
    pub psi: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl RadialState {
    /// Normalized Gaussian `exp(−r²/2w²)` on the grid of `config`.
    pub fn gaussian(config: &SolverConfig, dimension: Dimension, coupling: f64, width: f64) -> Result<Self> {
        config.validate()?;
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::NonPositiveWidth(width));
        }
        let op = RadialOperator::new(dimension, config.r_max, config.n_points);
        let mut psi: Vec<f64> = op
            .radii
            .iter()
            .map(|r| (-r * r / (2.0 * width * width)).exp())
            .collect();
        *psi.last_mut().expect("grid is non-empty") = 0.0;
        op.normalize(&mut psi);
        Ok(Self {
            dimension,
            coupling,
            spacing: op.spacing,
            psi,
            converged: false,
            iterations: 0,
        })
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.psi.len()).map(move |i| i as f64 * self.spacing)
    }

    pub fn r_max(&self) -> f64 {
        self.spacing * (self.psi.len() - 1) as f64
    }

    fn operator(&self) -> RadialOperator {
        RadialOperator::new(self.dimension, self.r_max(), self.psi.len())
    }

    /// `S_d Σ w_i ψ_i² r_i^{d−1}`.
    pub fn norm(&self) -> f64 {
        self.operator().norm_squared(&self.psi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub energy: EnergyBreakdown,
    pub chemical_potential: f64,
    pub rms_radius: f64,
    /// ψ(0).
    pub central_density_amplitude: f64,
}

/// Energy terms by quadrature, rms radius and central amplitude.
pub fn observables(state: &RadialState) -> Observables {
    let (energy, rms_radius) = state.operator().measure(&state.psi, state.coupling);
    Observables {
        energy,
        chemical_potential: energy.chemical_potential(),
        rms_radius,
        central_density_amplitude: state.psi[0],
    }
}

/// `2T − 2V + d·E_int` of the profile.
pub fn virial_residual(state: &RadialState) -> f64 {
    observables(state).energy.virial_residual(state.dimension.as_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollapseReason {
    RadiusFloor,
    EnergyFloor,
    /// The iterate stopped being finite.
    Divergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub reason: CollapseReason,
    pub iterations: usize,
    pub energy: f64,
    pub rms_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Relaxation {
    Converged(RadialState),
    Collapsed(Collapse),
}

impl Relaxation {
    pub fn converged(&self) -> Option<&RadialState> {
        match self {
            Relaxation::Converged(s) => Some(s),
            Relaxation::Collapsed(_) => None,
        }
    }

    pub fn is_collapse(&self) -> bool {
        matches!(self, Relaxation::Collapsed(_))
    }
}

/// Step-by-step driver for one relaxation.
#[derive(Debug, Clone)]
pub struct GradientFlow {
    config: SolverConfig,
    op: RadialOperator,
    coupling: f64,
    psi: Vec<f64>,
    work: TridiagonalWork,
    scratch: Vec<f64>,
    energy: EnergyBreakdown,
    rms_radius: f64,
    iterations: usize,
}

impl GradientFlow {
    pub fn new(
        config: &SolverConfig,
        dimension: Dimension,
        coupling: f64,
        initial: Option<&RadialState>,
    ) -> Result<Self> {
        config.validate()?;
        if !coupling.is_finite() {
            return Err(Error::NonFiniteCoupling(coupling));
        }
        let op = RadialOperator::new(dimension, config.r_max, config.n_points);
        if config.scheme == FlowScheme::Explicit {
            let limit = 1.8 / op.linear_spectral_bound();
            if config.time_step > limit {
                return Err(Error::InvalidConfig(format!(
                    "explicit flow needs time_step <= {limit:.3e} on this grid, got {}",
                    config.time_step
                )));
            }
        }
        let mut psi = match initial {
            Some(state) => {
                let same_grid = state.dimension == dimension
                    && state.psi.len() == config.n_points
                    && (state.spacing - op.spacing).abs() <= 1e-12 * op.spacing;
                if !same_grid {
                    return Err(Error::GridMismatch);
                }
                state.psi.clone()
            }
            None => RadialState::gaussian(config, dimension, coupling, 1.0)?.psi,
        };
        op.normalize(&mut psi);
        let (energy, rms_radius) = op.measure(&psi, coupling);
        Ok(Self {
            config: *config,
            op,
            coupling,
            psi,
            work: TridiagonalWork::default(),
            scratch: Vec::new(),
            energy,
            rms_radius,
            iterations: 0,
        })
    }

    /// One flow step followed by exact renormalization.
    pub fn step(&mut self) {
        let tau = self.config.time_step;
        match self.config.scheme {
            FlowScheme::SemiImplicit => self.op.implicit_step(&mut self.psi, &mut self.work, self.coupling, tau),
            FlowScheme::Explicit => self.op.explicit_step(&mut self.psi, &mut self.scratch, self.coupling, tau),
        }
        self.op.normalize(&mut self.psi);
        let (energy, rms) = self.op.measure(&self.psi, self.coupling);
        self.energy = energy;
        self.rms_radius = rms;
        self.iterations += 1;
    }

    pub fn energy(&self) -> EnergyBreakdown {
        self.energy
    }

    pub fn rms_radius(&self) -> f64 {
        self.rms_radius
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn norm(&self) -> f64 {
        self.op.norm_squared(&self.psi)
    }

    fn collapse_reason(&self) -> Option<CollapseReason> {
        if !(self.energy.total.is_finite() && self.rms_radius.is_finite()) {
            Some(CollapseReason::Divergence)
        } else if self.rms_radius < self.config.radius_floor() {
            Some(CollapseReason::RadiusFloor)
        } else if self.energy.total < self.config.energy_floor(self.coupling) {
            Some(CollapseReason::EnergyFloor)
        } else {
            None
        }
    }

    fn into_state(self, converged: bool) -> RadialState {
        RadialState {
            dimension: self.op.dimension,
            coupling: self.coupling,
            spacing: self.op.spacing,
            psi: self.psi,
            converged,
            iterations: self.iterations,
        }
    }

    /// Runs until convergence, collapse, or `max_iters`.
    pub fn run(mut self) -> Result<Relaxation> {
        let collapsed = |flow: &GradientFlow, reason| {
            Relaxation::Collapsed(Collapse {
                reason,
                iterations: flow.iterations,
                energy: flow.energy.total,
                rms_radius: flow.rms_radius,
            })
        };
        if let Some(reason) = self.collapse_reason() {
            return Ok(collapsed(&self, reason));
        }
        let tau = self.config.time_step;
        while self.iterations < self.config.max_iters {
            let previous = self.energy.total;
            self.step();
            if let Some(reason) = self.collapse_reason() {
                return Ok(collapsed(&self, reason));
            }
            if (self.energy.total - previous).abs() / tau < self.config.energy_tol {
                return Ok(Relaxation::Converged(self.into_state(true)));
            }
        }
        Err(Error::NonConverged {
            iterations: self.iterations,
            energy: self.energy.total,
        })
    }
}

/// Relaxes from `initial` (or the unit Gaussian) to the nearest minimum.
pub fn relax(
    config: &SolverConfig,
    dimension: Dimension,
    coupling: f64,
    initial: Option<&RadialState>,
) -> Result<Relaxation> {
    GradientFlow::new(config, dimension, coupling, initial)?.run()
}
