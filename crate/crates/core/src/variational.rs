//! Closed-form analysis of the energy functional on normalized Gaussians.
//!
//! With `ψ(r) = π^{−d/4} σ^{−d/2} exp(−r²/2σ²)` the energy per particle is
//!
//! ```text
//! E(σ) = (d/4)(σ⁻² + σ²) + g'·σ⁻ᵈ,    g' = g / (2 (2π)^{d/2})
//! ```
//!
//! and `dE/dσ = 0` reduces to `σ^{d+2} − σ^{d−2} = 2g'`. All operations here
//! accept a real dimension `d ≥ 1`; the formulas are analytic in `d`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::numeric::{bisect_then_newton, golden_section, log_space};
use crate::units::Coupling;

/// Lower end of the stationary-point search window, in oscillator lengths.
pub const SIGMA_MIN: f64 = 1e-6;
/// Upper end of the stationary-point search window.
pub const SIGMA_MAX: f64 = 1e3;
/// Log-spaced bracketing panels across the search window.
pub const SCAN_PANELS: usize = 4096;
/// `|E''|` at or below this is reported as degenerate.
pub const CURVATURE_TOL: f64 = 1e-8;

const ROOT_TOL: f64 = 1e-12;

/// A dimension and coupling for the Gaussian trial family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzProblem {
    dimension: f64,
    coupling: f64,
    reduced: f64,
}

impl AnsatzProblem {
    pub fn new(dimension: f64, coupling: f64) -> Result<Self> {
        if !(dimension.is_finite() && dimension >= 1.0) {
            return Err(Error::InvalidDimension(dimension));
        }
        if !coupling.is_finite() {
            return Err(Error::NonFiniteCoupling(coupling));
        }
        let reduced = coupling / (2.0 * (2.0 * PI).powf(dimension / 2.0));
        Ok(Self {
            dimension,
            coupling,
            reduced,
        })
    }

    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `g' = g / (2 (2π)^{d/2})`, the prefactor of `σ⁻ᵈ` in `E(σ)`.
    pub fn reduced_coupling(&self) -> f64 {
        self.reduced
    }

    fn total_energy(&self, sigma: f64) -> f64 {
        let d = self.dimension;
        0.25 * d * (sigma.powi(-2) + sigma * sigma) + self.reduced * sigma.powf(-d)
    }

    /// Magnitude of the terms entering the residual, used to scale tolerances.
    fn residual_scale(&self, sigma: f64) -> f64 {
        let d = self.dimension;
        (sigma.powf(d + 2.0) + sigma.powf(d - 2.0) + (2.0 * self.reduced).abs()).max(1.0)
    }
}

impl From<Coupling> for AnsatzProblem {
    fn from(c: Coupling) -> Self {
        // Coupling already guarantees a finite g and an integer dimension.
        Self::new(c.dimension.as_f64(), c.g).expect("valid coupling")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointKind {
    LocalMin,
    LocalMax,
    Degenerate,
}

impl PointKind {
    fn from_curvature(curvature: f64) -> Self {
        if curvature > CURVATURE_TOL {
            PointKind::LocalMin
        } else if curvature < -CURVATURE_TOL {
            PointKind::LocalMax
        } else {
            PointKind::Degenerate
        }
    }
}

/// A width of the trial Gaussian together with its energy and `E''(σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalPoint {
    pub sigma: f64,
    pub energy: EnergyBreakdown,
    pub curvature: f64,
    pub kind: PointKind,
}

impl VariationalPoint {
    fn at(problem: &AnsatzProblem, sigma: f64) -> Self {
        let curvature = curvature(problem, sigma);
        Self {
            sigma,
            energy: energy_terms(problem, sigma),
            curvature,
            kind: PointKind::from_curvature(curvature),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Stable,
    Metastable,
    Unstable,
    Critical,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Stable => "Stable",
            Classification::Metastable => "Metastable",
            Classification::Unstable => "Unstable",
            Classification::Critical => "Critical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub classification: Classification,
    pub points: Vec<VariationalPoint>,
    pub barrier_height: Option<f64>,
    pub mean_radius: Option<f64>,
}

impl StabilityReport {
    /// The local minimum, if the energy landscape has one.
    pub fn minimum(&self) -> Option<&VariationalPoint> {
        self.points.iter().find(|p| p.kind == PointKind::LocalMin)
    }
}

/// Threshold coupling where the metastable minimum disappears.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub coupling: f64,
    /// Width at which minimum and maximum merge; absent in two dimensions,
    /// where the threshold is reached as `σ → 0`.
    pub sigma: Option<f64>,
}

fn energy_terms(problem: &AnsatzProblem, sigma: f64) -> EnergyBreakdown {
    let d = problem.dimension;
    EnergyBreakdown::new(
        0.25 * d / (sigma * sigma),
        0.25 * d * sigma * sigma,
        problem.reduced * sigma.powf(-d),
    )
}

/// Energy per particle of the normalized Gaussian of width `sigma`.
pub fn gaussian_energy(problem: &AnsatzProblem, sigma: f64) -> Result<EnergyBreakdown> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonPositiveWidth(sigma));
    }
    Ok(energy_terms(problem, sigma))
}

/// `σ^{d+2} − σ^{d−2} − 2g'`, which equals `(2σ^{d+1}/d)·dE/dσ`.
pub fn stationarity_residual(problem: &AnsatzProblem, sigma: f64) -> f64 {
    let d = problem.dimension;
    // Grouped so that the d = 2 boundary (σ⁰ + 2g' = 0) cancels exactly.
    sigma.powf(d + 2.0) - (sigma.powf(d - 2.0) + 2.0 * problem.reduced)
}

fn residual_slope(problem: &AnsatzProblem, sigma: f64) -> f64 {
    let d = problem.dimension;
    (d + 2.0) * sigma.powf(d + 1.0) - (d - 2.0) * sigma.powf(d - 3.0)
}

/// `d²E/dσ²`.
pub fn curvature(problem: &AnsatzProblem, sigma: f64) -> f64 {
    let d = problem.dimension;
    0.5 * d * (3.0 * sigma.powi(-4) + 1.0) + d * (d + 1.0) * problem.reduced * sigma.powf(-d - 2.0)
}

/// Turning point of the residual, `σ⁴ = (d−2)/(d+2)`; only exists for `d > 2`.
fn residual_turning_point(dimension: f64) -> Option<f64> {
    (dimension > 2.0).then(|| ((dimension - 2.0) / (dimension + 2.0)).powf(0.25))
}

/// All stationary widths in `[SIGMA_MIN, SIGMA_MAX]`, ascending.
///
/// The window is split into log-spaced panels (with the residual's turning
/// point inserted as an extra node, so two nearly merged roots never share a
/// panel) and each sign change is refined by bisection and a Newton polish.
pub fn find_stationary_points(problem: &AnsatzProblem) -> Vec<VariationalPoint> {
    let mut nodes = log_space(SIGMA_MIN, SIGMA_MAX, SCAN_PANELS + 1);
    let turning = residual_turning_point(problem.dimension).filter(|s| *s > SIGMA_MIN && *s < SIGMA_MAX);
    if let Some(t) = turning {
        let at = nodes.partition_point(|&x| x < t);
        if nodes[at] != t {
            nodes.insert(at, t);
        }
    }

    let residual = |s: f64| stationarity_residual(problem, s);
    let values: Vec<f64> = nodes.iter().map(|&s| residual(s)).collect();

    // Nodes that are themselves roots: exact zeros anywhere, and the turning
    // point when the residual's extremum touches zero (the fold).
    let is_node_root: Vec<bool> = nodes
        .iter()
        .zip(&values)
        .map(|(&s, &v)| {
            v == 0.0 || (Some(s) == turning && v.abs() <= ROOT_TOL * problem.residual_scale(s))
        })
        .collect();

    let mut roots = Vec::new();
    for k in 0..nodes.len() {
        if is_node_root[k] {
            roots.push(nodes[k]);
            continue;
        }
        if k + 1 < nodes.len() && !is_node_root[k + 1] && (values[k] < 0.0) != (values[k + 1] < 0.0) {
            let root = bisect_then_newton(residual, |s| residual_slope(problem, s), nodes[k], nodes[k + 1]);
            roots.push(root);
        }
    }

    roots
        .into_iter()
        .map(|s| {
            debug_assert!(
                residual(s).abs() < 1e-10 * problem.residual_scale(s),
                "residual {} at sigma {s}",
                residual(s)
            );
            VariationalPoint::at(problem, s)
        })
        .collect()
}

/// Stable / metastable / unstable / critical, decided from the stationary
/// points plus the analytic small-σ behaviour of `E`.
pub fn classify(problem: &AnsatzProblem) -> StabilityReport {
    let points = find_stationary_points(problem);
    let d = problem.dimension;
    let has = |kind| points.iter().any(|p: &VariationalPoint| p.kind == kind);

    let classification = if d < 2.0 {
        Classification::Stable
    } else if d == 2.0 {
        // E = σ²/2 + (1 + 2g')/(2σ²): bounded below iff 1 + 2g' ≥ 0.
        let margin = 1.0 + 2.0 * problem.reduced;
        if margin.abs() <= ROOT_TOL {
            Classification::Critical
        } else if margin > 0.0 {
            Classification::Stable
        } else {
            Classification::Unstable
        }
    } else if problem.coupling >= 0.0 {
        Classification::Stable
    } else if has(PointKind::Degenerate) {
        Classification::Critical
    } else if has(PointKind::LocalMin) {
        Classification::Metastable
    } else {
        Classification::Unstable
    };

    let minimum = points.iter().find(|p| p.kind == PointKind::LocalMin);
    let maximum = points.iter().find(|p| p.kind == PointKind::LocalMax);
    let barrier_height = match (classification, minimum, maximum) {
        (Classification::Metastable, Some(lo), Some(hi)) => Some(hi.energy.total - lo.energy.total),
        _ => None,
    };
    let mean_radius = match classification {
        Classification::Stable | Classification::Metastable => minimum.map(|p| mean_radius(d, p.sigma)),
        _ => None,
    };

    StabilityReport {
        classification,
        points,
        barrier_height,
        mean_radius,
    }
}

/// Coupling at which the local minimum vanishes, or `None` when the energy is
/// bounded below for every coupling (`d < 2`).
pub fn critical_coupling(dimension: f64) -> Result<Option<CriticalPoint>> {
    if !(dimension.is_finite() && dimension >= 1.0) {
        return Err(Error::InvalidDimension(dimension));
    }
    let scale = (2.0 * PI).powf(dimension / 2.0);
    if dimension < 2.0 {
        return Ok(None);
    }
    if dimension == 2.0 {
        return Ok(Some(CriticalPoint {
            coupling: -scale,
            sigma: None,
        }));
    }
    // E' = 0 and E'' = 0 together: the residual and its slope both vanish.
    let sigma = ((dimension - 2.0) / (dimension + 2.0)).powf(0.25);
    let twice_reduced = sigma.powf(dimension + 2.0) - sigma.powf(dimension - 2.0);
    Ok(Some(CriticalPoint {
        coupling: scale * twice_reduced,
        sigma: Some(sigma),
    }))
}

/// Root-mean-square radius of the normalized Gaussian, `sqrt(d/2)·σ`.
pub fn mean_radius(dimension: f64, sigma: f64) -> f64 {
    (0.5 * dimension).sqrt() * sigma
}

/// Energy barrier between the metastable minimum and the maximum on its
/// small-σ side; `None` unless the problem is metastable.
pub fn barrier_height(problem: &AnsatzProblem) -> Option<f64> {
    classify(problem).barrier_height
}

/// Brute-force minimizer: evaluates `E` on `n_points` log-spaced widths, takes
/// the lowest interior grid minimum and refines it by golden section.
///
/// Returns `None` when no interior grid point beats its neighbours, i.e. the
/// energy keeps falling towards a window edge. Only energy values are used,
/// so the result is accurate to roughly `sqrt(ε)` in σ and the returned
/// point's stationarity residual is of that order as well.
pub fn scan_minimize(
    problem: &AnsatzProblem,
    sigma_lo: f64,
    sigma_hi: f64,
    n_points: usize,
) -> Result<Option<VariationalPoint>> {
    if !(sigma_lo > 0.0 && sigma_hi > sigma_lo && sigma_hi.is_finite() && n_points >= 3) {
        return Err(Error::InvalidScan {
            lo: sigma_lo,
            hi: sigma_hi,
            points: n_points,
        });
    }
    let nodes = log_space(sigma_lo, sigma_hi, n_points);
    let energies: Vec<f64> = nodes.iter().map(|&s| problem.total_energy(s)).collect();

    let best = (1..n_points - 1)
        .filter(|&k| energies[k] < energies[k - 1] && energies[k] <= energies[k + 1])
        .min_by(|&a, &b| energies[a].total_cmp(&energies[b]));

    Ok(best.map(|k| {
        let sigma = golden_section(|s| problem.total_energy(s), nodes[k - 1], nodes[k + 1], 1e-12);
        VariationalPoint::at(problem, sigma)
    }))
}
