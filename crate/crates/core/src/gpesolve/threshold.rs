//! Bisection on the coupling for the grid collapse threshold.

use serde::{Deserialize, Serialize};

use super::{observables, relax, RadialState, Relaxation, SolverConfig};
use crate::error::{Error, Result};
use crate::units::Dimension;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProbeOutcome {
    Converged { energy: f64, rms_radius: f64, virial: f64 },
    Collapsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub coupling: f64,
    pub outcome: ProbeOutcome,
}

/// Final bracket `[g_lo, g_hi]`: the flow collapses at `g_lo` and converges
/// at `g_hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridThreshold {
    pub g_lo: f64,
    pub g_hi: f64,
    /// Every relaxation run, in order, including the two bracket checks.
    pub probes: Vec<Probe>,
    /// Converged profile at `g_hi`.
    pub state: RadialState,
}

impl GridThreshold {
    pub fn center(&self) -> f64 {
        0.5 * (self.g_lo + self.g_hi)
    }
}

fn probe(outcome: &Relaxation, coupling: f64) -> Probe {
    let outcome = match outcome {
        Relaxation::Converged(state) => {
            let obs = observables(state);
            ProbeOutcome::Converged {
                energy: obs.energy.total,
                rms_radius: obs.rms_radius,
                virial: obs.energy.virial_residual(state.dimension.as_f64()),
            }
        }
        Relaxation::Collapsed(_) => ProbeOutcome::Collapsed,
    };
    Probe { coupling, outcome }
}

/// Bisects on `g` until `g_hi − g_lo < tol_g`. Each probe starts from the
/// most recent converged profile, so probes run sequentially.
pub fn critical_coupling_grid(
    config: &SolverConfig,
    dimension: Dimension,
    g_lo: f64,
    g_hi: f64,
    tol_g: f64,
) -> Result<GridThreshold> {
    if dimension == Dimension::One {
        return Err(Error::NoThreshold(1));
    }
    let invalid = |reason: &str| Error::InvalidBracket {
        g_lo,
        g_hi,
        reason: reason.to_owned(),
    };
    if !(g_lo.is_finite() && g_hi.is_finite() && g_lo < g_hi && g_hi < 0.0) {
        return Err(invalid("need g_lo < g_hi < 0"));
    }
    if !(tol_g.is_finite() && tol_g > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }

    let mut probes = Vec::new();
    let upper = relax(config, dimension, g_hi, None)?;
    probes.push(probe(&upper, g_hi));
    let Relaxation::Converged(mut state) = upper else {
        return Err(invalid("relaxation collapses at g_hi"));
    };
    let lower = relax(config, dimension, g_lo, Some(&state))?;
    probes.push(probe(&lower, g_lo));
    if !lower.is_collapse() {
        return Err(invalid("relaxation converges at g_lo"));
    }

    let (mut lo, mut hi) = (g_lo, g_hi);
    while hi - lo >= tol_g {
        let mid = 0.5 * (lo + hi);
        let outcome = relax(config, dimension, mid, Some(&state))?;
        probes.push(probe(&outcome, mid));
        match outcome {
            Relaxation::Converged(s) => {
                hi = mid;
                state = s;
            }
            Relaxation::Collapsed(_) => lo = mid,
        }
    }
    Ok(GridThreshold {
        g_lo: lo,
        g_hi: hi,
        probes,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimension_has_no_threshold() {
        let err = critical_coupling_grid(&SolverConfig::default(), Dimension::One, -10.0, -1.0, 0.1).unwrap_err();
        assert_eq!(err, Error::NoThreshold(1));
    }

    #[test]
    fn rejects_malformed_brackets() {
        let c = SolverConfig::default();
        assert!(critical_coupling_grid(&c, Dimension::Three, -1.0, -2.0, 0.1).is_err());
        assert!(critical_coupling_grid(&c, Dimension::Three, -2.0, 1.0, 0.1).is_err());
        assert!(critical_coupling_grid(&c, Dimension::Three, -9.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bracket_on_one_side() {
        let c = SolverConfig {
            n_points: 256,
            ..SolverConfig::default()
        };
        // Both ends converge.
        let err = critical_coupling_grid(&c, Dimension::Three, -3.0, -1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::InvalidBracket { .. }), "{err:?}");
        // Both ends collapse.
        let err = critical_coupling_grid(&c, Dimension::Three, -12.0, -10.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::InvalidBracket { .. }), "{err:?}");
    }
}
