//! Batch evaluation over coupling grids: radius curves, phase diagrams and
//! maximum atom numbers.
//!
//! Rows are independent and computed in parallel on the current rayon pool;
//! results always come back in input order, so output is identical for any
//! thread count. Run inside [`with_threads`] to pin the parallelism.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpesolve::{self, critical_coupling_grid, RadialState, Relaxation, SolverConfig};
use crate::units::{self, Dimension, PhysicalSystem};
use crate::variational::{self, AnsatzProblem, Classification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Variational,
    Grid,
    Both,
}

impl Engine {
    pub fn runs_variational(self) -> bool {
        matches!(self, Engine::Variational | Engine::Both)
    }

    pub fn runs_grid(self) -> bool {
        matches!(self, Engine::Grid | Engine::Both)
    }
}

/// Row label: the variational classification, or `NonConverged` when the
/// grid relaxation ran out of iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowClass {
    Stable,
    Metastable,
    Unstable,
    Critical,
    NonConverged,
}

impl RowClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RowClass::Stable => "Stable",
            RowClass::Metastable => "Metastable",
            RowClass::Unstable => "Unstable",
            RowClass::Critical => "Critical",
            RowClass::NonConverged => "NonConverged",
        }
    }

    /// Stable or metastable.
    pub fn has_minimum(self) -> bool {
        matches!(self, RowClass::Stable | RowClass::Metastable)
    }
}

impl From<Classification> for RowClass {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Stable => RowClass::Stable,
            Classification::Metastable => RowClass::Metastable,
            Classification::Unstable => RowClass::Unstable,
            Classification::Critical => RowClass::Critical,
        }
    }
}

impl fmt::Display for RowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridStatus {
    Converged,
    Collapsed,
    NonConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub dimension: Dimension,
    /// Sorted ascending.
    pub couplings: Vec<f64>,
    /// Parallel to `couplings` when the sweep was built from atom numbers.
    pub atom_counts: Option<Vec<u64>>,
    pub engine: Engine,
    pub solver: SolverConfig,
    /// Width of the Gaussian that seeds each grid relaxation.
    pub initial_width: f64,
}

impl SweepSpec {
    pub fn from_couplings(dimension: Dimension, couplings: Vec<f64>, engine: Engine) -> Self {
        Self {
            dimension,
            couplings,
            atom_counts: None,
            engine,
            solver: SolverConfig::default(),
            initial_width: 1.0,
        }
    }

    /// 3D sweep over atom numbers (ascending) of `system`.
    pub fn from_atom_counts(system: &PhysicalSystem, atom_counts: Vec<u64>, engine: Engine) -> Result<Self> {
        check_sorted(atom_counts.iter().map(|&n| n as f64), "atom counts")?;
        let couplings = atom_counts
            .iter()
            .map(|&n| Ok(units::coupling_from_physical(&system.with_atom_count(n)?, Dimension::Three)?.g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dimension: Dimension::Three,
            couplings,
            atom_counts: Some(atom_counts),
            engine,
            solver: SolverConfig::default(),
            initial_width: 1.0,
        })
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_initial_width(mut self, width: f64) -> Self {
        self.initial_width = width;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.couplings.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidSweep("couplings must be finite".into()));
        }
        match &self.atom_counts {
            Some(atoms) => {
                if atoms.len() != self.couplings.len() {
                    return Err(Error::InvalidSweep("atom counts and couplings differ in length".into()));
                }
                check_sorted(atoms.iter().map(|&n| n as f64), "atom counts")?;
            }
            None => check_sorted(self.couplings.iter().copied(), "couplings")?,
        }
        if self.engine.runs_grid() {
            self.solver.validate()?;
            if !(self.initial_width.is_finite() && self.initial_width > 0.0) {
                return Err(Error::NonPositiveWidth(self.initial_width));
            }
        }
        Ok(())
    }
}

fn check_sorted(values: impl Iterator<Item = f64> + Clone, what: &str) -> Result<()> {
    if values.clone().next().is_none() {
        return Err(Error::InvalidSweep(format!("{what} must not be empty")));
    }
    let mut prev = f64::NEG_INFINITY;
    for v in values {
        if v < prev {
            return Err(Error::InvalidSweep(format!("{what} must be sorted ascending")));
        }
        prev = v;
    }
    Ok(())
}

/// One coupling value. Radii and energies are present only where the engine
/// found a (meta)stable state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dimension: Dimension,
    pub coupling: f64,
    pub atom_count: Option<u64>,
    pub classification: RowClass,
    pub sigma_min: Option<f64>,
    pub rms_radius_variational: Option<f64>,
    pub rms_radius_grid: Option<f64>,
    pub energy_variational: Option<f64>,
    pub energy_grid: Option<f64>,
    pub barrier: Option<f64>,
    pub grid_status: Option<GridStatus>,
}

impl SweepRow {
    fn empty(dimension: Dimension, coupling: f64, atom_count: Option<u64>) -> Self {
        Self {
            dimension,
            coupling,
            atom_count,
            classification: RowClass::Unstable,
            sigma_min: None,
            rms_radius_variational: None,
            rms_radius_grid: None,
            energy_variational: None,
            energy_grid: None,
            barrier: None,
            grid_status: None,
        }
    }

    /// Radius from the grid when available, else from the Gaussian.
    pub fn rms_radius(&self) -> Option<f64> {
        self.rms_radius_grid.or(self.rms_radius_variational)
    }
}

fn fill_variational(row: &mut SweepRow) -> Result<()> {
    let d = row.dimension.as_f64();
    let report = variational::classify(&AnsatzProblem::new(d, row.coupling)?);
    row.classification = report.classification.into();
    if let Some(min) = report.minimum() {
        row.sigma_min = Some(min.sigma);
        row.rms_radius_variational = Some(variational::mean_radius(d, min.sigma));
        row.energy_variational = Some(min.energy.total);
    }
    row.barrier = report.barrier_height;
    Ok(())
}

fn fill_grid(row: &mut SweepRow, spec: &SweepSpec) -> Result<()> {
    let initial = RadialState::gaussian(&spec.solver, row.dimension, row.coupling, spec.initial_width)?;
    let status = match gpesolve::relax(&spec.solver, row.dimension, row.coupling, Some(&initial)) {
        Ok(Relaxation::Converged(state)) => {
            let obs = gpesolve::observables(&state);
            row.rms_radius_grid = Some(obs.rms_radius);
            row.energy_grid = Some(obs.energy.total);
            GridStatus::Converged
        }
        Ok(Relaxation::Collapsed(_)) => GridStatus::Collapsed,
        Err(Error::NonConverged { .. }) => GridStatus::NonConverged,
        Err(e) => return Err(e),
    };
    row.grid_status = Some(status);
    if status == GridStatus::NonConverged {
        row.classification = RowClass::NonConverged;
    } else if !spec.engine.runs_variational() {
        row.classification = match status {
            GridStatus::Collapsed => RowClass::Unstable,
            _ if row.dimension == Dimension::Three && row.coupling < 0.0 => RowClass::Metastable,
            _ => RowClass::Stable,
        };
    }
    Ok(())
}

fn evaluate(spec: &SweepSpec, index: usize) -> Result<SweepRow> {
    let atoms = spec.atom_counts.as_ref().map(|a| a[index]);
    let mut row = SweepRow::empty(spec.dimension, spec.couplings[index], atoms);
    if spec.engine.runs_variational() {
        fill_variational(&mut row)?;
    }
    if spec.engine.runs_grid() {
        fill_grid(&mut row, spec)?;
    }
    Ok(row)
}

/// One row per coupling, in input order. Grid rows that run out of
/// iterations are labelled `NonConverged` rather than failing the sweep.
pub fn radius_vs_coupling(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    (0..spec.couplings.len())
        .into_par_iter()
        .map(|i| evaluate(spec, i))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    #[serde(flatten)]
    pub row: SweepRow,
    /// Classification differs from the previous coupling in the same
    /// dimension.
    pub boundary: bool,
}

/// Variational classification on every `(d, g)` pair, dimension-major in the
/// given orders.
pub fn phase_diagram(dimensions: &[Dimension], couplings: &[f64]) -> Result<Vec<PhaseRow>> {
    let points: Vec<(Dimension, f64)> = dimensions
        .iter()
        .flat_map(|&d| couplings.iter().map(move |&g| (d, g)))
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(d, g)| {
            let mut row = SweepRow::empty(d, g, None);
            fill_variational(&mut row)?;
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut out: Vec<PhaseRow> = Vec::with_capacity(rows.len());
    for row in rows {
        let boundary = out
            .last()
            .is_some_and(|prev| prev.row.dimension == row.dimension && prev.row.classification != row.classification);
        out.push(PhaseRow { row, boundary });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdEngine {
    Variational,
    /// Bisection with the given bracket and tolerance.
    Grid {
        solver: SolverConfig,
        g_lo: f64,
        g_hi: f64,
        tol_g: f64,
    },
}

impl ThresholdEngine {
    /// Grid bisection at solver defaults with the standard 3D bracket.
    pub fn default_grid() -> Self {
        ThresholdEngine::Grid {
            solver: SolverConfig::default(),
            g_lo: -8.4,
            g_hi: -4.0,
            tol_g: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BosonLimit {
    Bounded {
        atoms: u64,
        /// The `g_c` that was converted (bracket center for the grid).
        critical_coupling: f64,
    },
    Unbounded,
}

/// Largest atom number with a (meta)stable condensate: `⌊N_c⌋`. One
/// dimension never collapses; two dimensions have no SI mapping.
pub fn max_boson_number(system: &PhysicalSystem, dimension: Dimension, engine: &ThresholdEngine) -> Result<BosonLimit> {
    match dimension {
        Dimension::One => return Ok(BosonLimit::Unbounded),
        Dimension::Two => return Err(Error::PhysicalCouplingRequires3d(2)),
        Dimension::Three => {}
    }
    if system.scattering_length().is_nan() || system.scattering_length() >= 0.0 {
        return Err(Error::NotAttractive(system.scattering_length()));
    }
    let g_c = match *engine {
        ThresholdEngine::Variational => variational::critical_coupling(3.0)?
            .ok_or(Error::NoThreshold(3))?
            .coupling,
        ThresholdEngine::Grid {
            solver,
            g_lo,
            g_hi,
            tol_g,
        } => critical_coupling_grid(&solver, dimension, g_lo, g_hi, tol_g)?.center(),
    };
    let atoms = units::critical_atom_number(system, g_c)?.floor() as u64;
    Ok(BosonLimit::Bounded {
        atoms,
        critical_coupling: g_c,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers (`None`: rayon default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::ThreadPool("thread count must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}
