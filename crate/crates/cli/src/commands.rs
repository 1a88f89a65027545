use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;

use bec_core::gpesolve::{self, critical_coupling_grid, RadialState, Relaxation, SolverConfig};
use bec_core::sweep::{self, Engine, SweepRow, SweepSpec};
use bec_core::units::{self, Dimension, PhysicalSystem};
use bec_core::variational::{self, AnsatzProblem};
use serde_json::{json, Value};

use crate::args::{AnalyzeArgs, CriticalArgs, EngineArg, GridArgs, PhaseArgs, PhysicalArgs, SweepArgs};
use crate::error::CliError;
use crate::output::{CsvRow, Document, Row};

/// A rendered document plus the failure to report after printing it.
pub struct Outcome {
    pub document: Document,
    pub error: Option<CliError>,
}

impl From<Document> for Outcome {
    fn from(document: Document) -> Self {
        Self { document, error: None }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn dimension(d: u8) -> Result<Dimension, CliError> {
    Dimension::try_from(d).map_err(|_| usage(format!("--dimension must be 1, 2 or 3, got {d}")))
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Variational => Engine::Variational,
            EngineArg::Grid => Engine::Grid,
            EngineArg::Both => Engine::Both,
        }
    }
}

fn solver_config(args: &GridArgs) -> Result<(SolverConfig, f64), CliError> {
    let defaults = SolverConfig::default();
    let config = SolverConfig {
        r_max: args.rmax.unwrap_or(defaults.r_max),
        n_points: args.points.unwrap_or(defaults.n_points),
        time_step: args.dt.unwrap_or(defaults.time_step),
        energy_tol: args.tol.unwrap_or(defaults.energy_tol),
        max_iters: args.max_iters.unwrap_or(defaults.max_iters),
        ..defaults
    };
    config.validate()?;
    let width = args.initial_width.unwrap_or(1.0);
    if !(width.is_finite() && width > 0.0) {
        return Err(usage(format!("--initial-width must be positive, got {width}")));
    }
    Ok((config, width))
}

impl PhysicalArgs {
    fn any(&self) -> bool {
        self.scattering_length.is_some() || self.trap_frequency.is_some() || self.mass.is_some()
    }

    /// SI system with the trap frequency converted from Hz to rad/s.
    fn system(&self, atoms: u64) -> Result<PhysicalSystem, CliError> {
        match (self.scattering_length, self.trap_frequency, self.mass) {
            (Some(a_s), Some(f), Some(m)) => Ok(PhysicalSystem::new(m, 2.0 * PI * f, a_s, atoms)?),
            _ => Err(usage(
                "trap parameters need all of --scattering-length, --trap-frequency and --mass",
            )),
        }
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| usage(format!("{flag}: cannot parse `{}`", t.trim())))
        })
        .collect()
}

/// `lo:hi:steps` with both endpoints included.
fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || usage(format!("--coupling-range expects lo:hi:steps, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    if lo > hi {
        return Err(usage(format!("--coupling-range: lo {lo} is above hi {hi}")));
    }
    match steps {
        0 => Err(usage("--coupling-range needs at least one step")),
        1 if lo == hi => Ok(vec![lo]),
        1 => Err(usage("--coupling-range with one step needs lo == hi")),
        n => Ok((0..n)
            .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect()),
    }
}

fn couplings(range: &Option<String>, list: &Option<String>) -> Result<Vec<f64>, CliError> {
    match (range, list) {
        (Some(r), None) => parse_range(r),
        (None, Some(l)) => {
            let values: Vec<f64> = parse_list(l, "--coupling-list")?;
            if values.iter().any(|g| !g.is_finite()) {
                return Err(usage("--coupling-list values must be finite"));
            }
            Ok(values)
        }
        (Some(_), Some(_)) => Err(usage("give only one of --coupling-range and --coupling-list")),
        (None, None) => Err(usage("need --coupling-range or --coupling-list")),
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let d = dimension(args.dimension)?;
    let physical = args.atoms.is_some() || args.physical.any();
    let (g, atoms) = match (args.coupling, physical) {
        (Some(_), true) => return Err(usage("give either --coupling or the trap parameters, not both")),
        (None, false) => return Err(usage("need --coupling or --atoms with trap parameters")),
        (Some(g), false) => (g, None),
        (None, true) => {
            if d != Dimension::Three {
                return Err(usage("trap parameters are only supported for --dimension 3"));
            }
            let n = args.atoms.ok_or_else(|| usage("trap parameters need --atoms"))?;
            let system = args.physical.system(n)?;
            (units::coupling_from_physical(&system, d)?.g, Some(n))
        }
    };
    if args.profile_out.is_some() && !args.grid {
        return Err(usage("--profile-out needs --grid"));
    }
    let problem = AnsatzProblem::new(d.as_f64(), g)?;
    let report = variational::classify(&problem);

    let mut row = SweepRow {
        dimension: d,
        coupling: g,
        atom_count: atoms,
        classification: report.classification.into(),
        sigma_min: report.minimum().map(|p| p.sigma),
        rms_radius_variational: report.mean_radius,
        rms_radius_grid: None,
        energy_variational: report.minimum().map(|p| p.energy.total),
        energy_grid: None,
        barrier: report.barrier_height,
        grid_status: None,
    };

    let mut summary = String::new();
    let _ = writeln!(summary, "dimension         {d}");
    let _ = writeln!(summary, "coupling g        {g}");
    if let Some(n) = atoms {
        let _ = writeln!(summary, "atoms             {n}");
    }
    let _ = writeln!(summary, "reduced g'        {:.9}", problem.reduced_coupling());
    let _ = writeln!(summary, "classification    {}", report.classification.as_str());
    for p in &report.points {
        let _ = writeln!(
            summary,
            "  {:<11} sigma = {:.9}  E = {:.9}  E'' = {:.6e}",
            format!("{:?}", p.kind),
            p.sigma,
            p.energy.total,
            p.curvature
        );
    }
    if let Some(b) = report.barrier_height {
        let _ = writeln!(summary, "barrier           {b:.9}");
    }
    if let Some(r) = report.mean_radius {
        let _ = writeln!(summary, "rms radius        {r:.9}");
    }

    let mut grid_json = Value::Null;
    let mut error = None;
    if args.grid {
        let (config, width) = solver_config(&args.solver)?;
        let initial = RadialState::gaussian(&config, d, g, width)?;
        match gpesolve::relax(&config, d, g, Some(&initial)) {
            Ok(Relaxation::Converged(state)) => {
                let obs = gpesolve::observables(&state);
                let virial = gpesolve::virial_residual(&state);
                row.rms_radius_grid = Some(obs.rms_radius);
                row.energy_grid = Some(obs.energy.total);
                row.grid_status = Some(sweep::GridStatus::Converged);
                let _ = writeln!(summary, "grid              converged after {} iterations", state.iterations);
                let _ = writeln!(
                    summary,
                    "  E = {:.9}  (T {:.9}, V {:.9}, E_int {:.9})",
                    obs.energy.total, obs.energy.kinetic, obs.energy.potential, obs.energy.interaction
                );
                let _ = writeln!(summary, "  mu = {:.9}  rms = {:.9}  psi(0) = {:.9}", obs.chemical_potential, obs.rms_radius, obs.central_density_amplitude);
                let _ = writeln!(summary, "  virial residual {virial:.3e}");
                grid_json = json!({
                    "status": "converged",
                    "iterations": state.iterations,
                    "observables": obs,
                    "virial_residual": virial,
                });
                if let Some(path) = &args.profile_out {
                    let file = File::create(path).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                    gpesolve::write_profile(&state, BufWriter::new(file))
                        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                }
            }
            Ok(Relaxation::Collapsed(c)) => {
                row.grid_status = Some(sweep::GridStatus::Collapsed);
                let _ = writeln!(summary, "grid              collapsed ({:?}) after {} iterations", c.reason, c.iterations);
                grid_json = json!({ "status": "collapsed", "collapse": c });
            }
            Err(e @ bec_core::Error::NonConverged { .. }) => {
                row.grid_status = Some(sweep::GridStatus::NonConverged);
                row.classification = sweep::RowClass::NonConverged;
                let _ = writeln!(summary, "grid              {e}");
                grid_json = json!({ "status": "nonconverged", "message": e.to_string() });
                error = Some(e.into());
            }
            Err(e) => return Err(e.into()),
        }
    }

    let document = Document {
        command: "analyze",
        json: json!({
            "dimension": d.get(),
            "coupling": g,
            "atoms": atoms,
            "variational": report,
            "grid": grid_json,
        }),
        rows: vec![Row::from(&row)],
        summary,
    };
    Ok(Outcome { document, error })
}

fn default_bracket(d: Dimension) -> (f64, f64, f64) {
    match d {
        Dimension::Two => (-6.2, -3.0, 0.05),
        _ => (-8.4, -4.0, 0.02),
    }
}

pub fn critical(args: &CriticalArgs) -> Result<Outcome, CliError> {
    let d = dimension(args.dimension)?;
    let engine = Engine::from(args.engine);
    if d == Dimension::One && engine.runs_grid() {
        return Err(usage("no collapse threshold exists in one dimension; use --engine variational"));
    }
    let system = if args.physical.any() {
        if d == Dimension::Two {
            return Err(usage("maximum atom numbers are only defined for --dimension 1 or 3"));
        }
        Some(args.physical.system(1)?)
    } else {
        None
    };
    let n_max = |g_c: f64| -> Result<u64, CliError> {
        let sys = system.as_ref().expect("checked by caller");
        Ok(units::critical_atom_number(sys, g_c)?.floor() as u64)
    };

    let mut summary = String::new();
    let mut rows = Vec::new();
    let mut doc = json!({ "dimension": d.get(), "engine": format!("{:?}", args.engine).to_lowercase() });

    if engine.runs_variational() {
        match variational::critical_coupling(d.as_f64())? {
            Some(cp) => {
                let _ = writeln!(summary, "variational g_c   {:.9}", cp.coupling);
                if let Some(s) = cp.sigma {
                    let _ = writeln!(summary, "variational sigma {s:.9}");
                }
                let atoms = match system {
                    Some(_) => Some(n_max(cp.coupling)?),
                    None => None,
                };
                if let Some(n) = atoms {
                    let _ = writeln!(summary, "variational N_max {n}");
                }
                doc["variational"] = json!({ "coupling": cp.coupling, "sigma": cp.sigma, "max_atoms": atoms });
                rows.push(Row {
                    csv: CsvRow {
                        dimension: d.get(),
                        coupling: cp.coupling,
                        atoms,
                        classification: "Critical".into(),
                        sigma_min: cp.sigma,
                        rms_var: cp.sigma.map(|s| variational::mean_radius(d.as_f64(), s)),
                        rms_grid: None,
                        energy_var: None,
                        energy_grid: None,
                        barrier: None,
                    },
                    grid_status: None,
                    boundary: None,
                });
            }
            None => {
                let _ = writeln!(summary, "variational       no finite threshold");
                if system.is_some() {
                    let _ = writeln!(summary, "N_max             unbounded");
                }
                doc["variational"] = json!({ "coupling": null, "sigma": null, "max_atoms": null, "unbounded": true });
            }
        }
    }

    if engine.runs_grid() {
        let (config, _) = solver_config(&args.solver)?;
        let (lo, hi, tol) = default_bracket(d);
        let (g_lo, g_hi, tol_g) = (args.g_lo.unwrap_or(lo), args.g_hi.unwrap_or(hi), args.tol_g.unwrap_or(tol));
        if !(g_lo < g_hi && g_hi < 0.0) {
            return Err(usage(format!("bracket needs --g-lo < --g-hi < 0, got [{g_lo}, {g_hi}]")));
        }
        if !(tol_g.is_finite() && tol_g > 0.0) {
            return Err(usage("--tol-g must be positive"));
        }
        let t = critical_coupling_grid(&config, d, g_lo, g_hi, tol_g)?;
        let atoms = match system {
            Some(_) => Some(n_max(t.center())?),
            None => None,
        };
        let _ = writeln!(summary, "grid bracket      [{:.6}, {:.6}]  center {:.6}  ({} probes)", t.g_lo, t.g_hi, t.center(), t.probes.len());
        if let Some(n) = atoms {
            let _ = writeln!(summary, "grid N_max        {n}");
        }
        doc["grid"] = json!({
            "g_lo": t.g_lo,
            "g_hi": t.g_hi,
            "center": t.center(),
            "probes": t.probes,
            "max_atoms": atoms,
        });
        rows.push(Row {
            csv: CsvRow {
                dimension: d.get(),
                coupling: t.center(),
                atoms,
                classification: "Critical".into(),
                sigma_min: None,
                rms_var: None,
                rms_grid: Some(gpesolve::observables(&t.state).rms_radius),
                energy_var: None,
                energy_grid: Some(gpesolve::observables(&t.state).energy.total),
                barrier: None,
            },
            grid_status: Some(sweep::GridStatus::Converged),
            boundary: None,
        });
    }

    Ok(Document {
        command: "critical",
        json: doc,
        rows: if rows.is_empty() { Vec::new() } else { rows },
        summary,
    }
    .into())
}

pub fn sweep(args: &SweepArgs, threads: Option<usize>) -> Result<Outcome, CliError> {
    let d = dimension(args.dimension)?;
    let engine = Engine::from(args.engine);
    let (config, width) = solver_config(&args.solver)?;
    let spec = match &args.atoms_list {
        Some(list) => {
            if args.coupling_range.is_some() || args.coupling_list.is_some() {
                return Err(usage("give only one of --atoms-list, --coupling-range and --coupling-list"));
            }
            if d != Dimension::Three {
                return Err(usage("--atoms-list is only supported for --dimension 3"));
            }
            let atoms: Vec<u64> = parse_list(list, "--atoms-list")?;
            let system = args.physical.system(1)?;
            SweepSpec::from_atom_counts(&system, atoms, engine)?
        }
        None => {
            if args.physical.any() {
                return Err(usage("trap parameters are only used with --atoms-list"));
            }
            SweepSpec::from_couplings(d, couplings(&args.coupling_range, &args.coupling_list)?, engine)
        }
    }
    .with_solver(config)
    .with_initial_width(width);

    let rows = sweep::with_threads(threads, || sweep::radius_vs_coupling(&spec))??;
    Ok(Document {
        command: "sweep",
        json: json!({
            "dimension": d.get(),
            "engine": format!("{:?}", args.engine).to_lowercase(),
        }),
        rows: rows.iter().map(Row::from).collect(),
        summary: String::new(),
    }
    .into())
}

pub fn phase(args: &PhaseArgs, threads: Option<usize>) -> Result<Outcome, CliError> {
    let dims = args.dimension.iter().map(|&d| dimension(d)).collect::<Result<Vec<_>, _>>()?;
    if dims.is_empty() {
        return Err(usage("need at least one --dimension"));
    }
    let gs = couplings(&args.coupling_range, &args.coupling_list)?;
    let rows = sweep::with_threads(threads, || sweep::phase_diagram(&dims, &gs))??;
    Ok(Document {
        command: "phase",
        json: json!({ "dimensions": dims.iter().map(|d| d.get()).collect::<Vec<_>>() }),
        rows: rows.iter().map(Row::from).collect(),
        summary: String::new(),
    }
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_endpoints() {
        let r = parse_range("-10:2:61").unwrap();
        assert_eq!(r.len(), 61);
        assert_eq!(r[0], -10.0);
        assert_eq!(r[60], 2.0);
        assert!((r[1] + 9.8).abs() < 1e-12);
        assert_eq!(parse_range("3:3:1").unwrap(), [3.0]);
    }

    #[test]
    fn malformed_ranges() {
        for bad in ["5:1:10", "1:2", "a:2:3", "0:1:0", "0:1:1", "0:inf:3", "1:2:3:4"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<f64>("-6, -4,0", "x").unwrap(), [-6.0, -4.0, 0.0]);
        assert!(parse_list::<u64>("1,x", "x").is_err());
    }
}
