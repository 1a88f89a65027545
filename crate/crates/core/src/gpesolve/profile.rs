use std::io::{self, Write};

use super::{observables, RadialState};

/// Two-column `r psi` text with a `#` header carrying d, g, energy and
/// iteration count.
pub fn write_profile<W: Write>(state: &RadialState, mut out: W) -> io::Result<()> {
    let energy = observables(state).energy.total;
    writeln!(
        out,
        "# d={} g={} energy={} iterations={}",
        state.dimension, state.coupling, energy, state.iterations
    )?;
    for (r, psi) in state.radii().zip(&state.psi) {
        writeln!(out, "{r} {psi}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpesolve::SolverConfig;
    use crate::units::Dimension;

    #[test]
    fn header_and_columns() {
        let config = SolverConfig {
            n_points: 32,
            ..SolverConfig::default()
        };
        let state = RadialState::gaussian(&config, Dimension::Two, -1.5, 1.0).unwrap();
        let mut buf = Vec::new();
        write_profile(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("# d=2 g=-1.5 energy="));
        assert!(header.ends_with("iterations=0"));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let mut cols = l.split_whitespace().map(|c| c.parse::<f64>().unwrap());
                (cols.next().unwrap(), cols.next().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 32);
        assert_eq!(rows[0].0, 0.0);
        assert_eq!(rows[31], (state.r_max(), 0.0));
        assert_eq!(rows[5].1, state.psi[5]);
    }
}
