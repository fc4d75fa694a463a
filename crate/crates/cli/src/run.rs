//! Runs every method of a scenario and writes trajectories and a report.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dcg_core::analytic_models::{fano_bms_population, fano_dcg_population, spin_boson_population};
use dcg_core::dcg_engine::{bms_liouvillian, evolve};
use dcg_core::exact_oracles::{dephasing_gamma, fano_exact_occupation, two_spin_exact};
use dcg_core::quantum_core::matrix_exponential;
use dcg_core::{dcg_propagate, DcgError, DensityMatrix, QuadratureConfig, C64};

use crate::config::{Method, ModelKind, Scenario};
use crate::error::{CliError, Result};
use crate::models::{build, BuiltModel};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's output directory.
    pub out_dir: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
    /// Run the methods on separate threads.
    pub parallel: bool,
}

/// Output of one method on the time grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    States(Vec<DensityMatrix>),
    /// `ρ_00` only, for methods that propagate the population block.
    Populations(Vec<f64>),
}

impl Trajectory {
    pub fn rho00(&self) -> Vec<f64> {
        match self {
            Trajectory::States(s) => s.iter().map(|r| r.get(0, 0).re).collect(),
            Trajectory::Populations(p) => p.clone(),
        }
    }

    fn max_trace_defect(&self) -> f64 {
        match self {
            Trajectory::States(s) => s.iter().map(|r| (r.matrix().trace() - 1.0).norm()).fold(0.0, f64::max),
            Trajectory::Populations(_) => 0.0,
        }
    }

    fn min_eigenvalue(&self) -> f64 {
        match self {
            Trajectory::States(s) => s.iter().map(|r| r.min_eigenvalue()).fold(f64::INFINITY, f64::min),
            Trajectory::Populations(p) => p.iter().map(|&x| x.min(1.0 - x)).fold(f64::INFINITY, f64::min),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Trajectory::States(s) => s.iter().all(|r| r.matrix().is_finite()),
            Trajectory::Populations(p) => p.iter().all(|x| x.is_finite()),
        }
    }
}

/// Largest deviation between two trajectories on a common grid, over the
/// full state when both carry it and over `ρ_00` otherwise.
pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    match (a, b) {
        (Trajectory::States(x), Trajectory::States(y)) => x
            .iter()
            .zip(y)
            .map(|(p, q)| p.matrix().max_deviation(q.matrix()))
            .fold(0.0, f64::max),
        _ => a.rho00().iter().zip(b.rho00()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
    }
}

/// Runs one method; the result is in the interaction picture.
pub fn compute_method(
    scenario: &Scenario,
    method: Method,
    quadrature: &QuadratureConfig,
) -> dcg_core::Result<Trajectory> {
    let model = build(scenario.model, &scenario.params)?;
    let rho0 = model.initial_state(scenario.rho0)?;
    let grid = scenario.grid.points();
    let p00 = rho0.get(0, 0).re;
    let populations = |f: &dyn Fn(f64) -> dcg_core::Result<f64>| -> dcg_core::Result<Trajectory> {
        grid.iter()
            .map(|&t| if t == 0.0 { Ok(p00) } else { f(t) })
            .collect::<dcg_core::Result<Vec<_>>>()
            .map(Trajectory::Populations)
    };
    let traj = match (&model, method) {
        (BuiltModel::SpinBoson(p), Method::Dcg(n @ (2 | 4))) if scenario.model == ModelKind::SpinBosonDissipative => {
            populations(&|t| spin_boson_population(n, t, p, p00))?
        }
        (BuiltModel::Fano(p), Method::Dcg(n @ (2 | 4))) => populations(&|t| fano_dcg_population(n, t, t, p, p00))?,
        (BuiltModel::Fano(p), Method::Bms) => populations(&|t| fano_bms_population(t, p, p00))?,
        (BuiltModel::Fano(p), Method::Exact) => {
            populations(&|t| fano_exact_occupation(t, p, 1.0 - p00).map(|n| 1.0 - n))?
        }
        (_, Method::Dcg(n)) => Trajectory::States(dcg_propagate(
            &model.system()?,
            &model.bath(),
            n,
            &rho0,
            &grid,
            quadrature,
        )?),
        (_, Method::Bms) => {
            let l = bms_liouvillian(&model.system()?, &model.bath())?;
            Trajectory::States(grid.iter().map(|&t| evolve(&l, &rho0, t)).collect::<dcg_core::Result<_>>()?)
        }
        (BuiltModel::TwoSpin { params, set, bath }, Method::Exact) => {
            let rho_b = DensityMatrix::new(bath.initial_state())?;
            let h = model.system()?.hamiltonian().clone();
            let states = grid
                .iter()
                .map(|&t| {
                    let s = two_spin_exact(params, *set, &rho0, &rho_b, t)?;
                    let u = matrix_exponential(&h.scale(C64::new(0.0, t)))?;
                    DensityMatrix::new(u.matmul(s.matrix())?.matmul(&u.adjoint())?.hermitian_part())
                })
                .collect::<dcg_core::Result<_>>()?;
            Trajectory::States(states)
        }
        (BuiltModel::SpinBoson(p), Method::Exact) => {
            let states = grid
                .iter()
                .map(|&t| {
                    let decay = (-dephasing_gamma(t, &p.bath, p.lambda)?).exp();
                    let mut m = rho0.matrix().clone();
                    m[(0, 1)] *= decay;
                    m[(1, 0)] *= decay;
                    DensityMatrix::new(m)
                })
                .collect::<dcg_core::Result<_>>()?;
            Trajectory::States(states)
        }
    };
    if !traj.is_finite() {
        return Err(DcgError::Numerical(format!("{method} produced non-finite values")));
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: Method,
    /// `Err` holds the failure message.
    pub outcome: std::result::Result<MethodStats, String>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub max_trace_defect: f64,
    pub min_eigenvalue: f64,
    pub max_dev_exact: Option<f64>,
    pub final_rho00: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDelta {
    pub a: Method,
    pub b: Method,
    pub max_abs_rho00: f64,
    pub at_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub out_dir: PathBuf,
    pub methods: Vec<MethodReport>,
    pub pairs: Vec<PairDelta>,
    pub trajectories: Vec<(Method, Trajectory)>,
}

impl RunReport {
    pub fn any_failed(&self) -> bool {
        self.methods.iter().any(|m| m.outcome.is_err())
    }

    pub fn trajectory(&self, method: Method) -> Option<&Trajectory> {
        self.trajectories.iter().find(|(m, _)| *m == method).map(|(_, t)| t)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} -> {}", self.scenario, self.out_dir.display())?;
        writeln!(
            f,
            "{:<7} {:>12} {:>13} {:>13} {:>11} {:>9}",
            "method", "trace defect", "min eigval", "dev exact", "final rho00", "seconds"
        )?;
        for m in &self.methods {
            match &m.outcome {
                Ok(s) => writeln!(
                    f,
                    "{:<7} {:>12.3e} {:>13.6e} {:>13} {:>11.6} {:>9.3}",
                    m.method.to_string(),
                    s.max_trace_defect,
                    s.min_eigenvalue,
                    s.max_dev_exact.map_or("-".into(), |d| format!("{d:.6e}")),
                    s.final_rho00,
                    m.wall_seconds
                )?,
                Err(e) => writeln!(f, "{:<7} FAILED: {e}", m.method.to_string())?,
            }
        }
        for p in &self.pairs {
            writeln!(f, "max |rho00({}) - rho00({})| = {:.6e} at t = {}", p.a, p.b, p.max_abs_rho00, p.at_t)?;
        }
        Ok(())
    }
}

/// Runs all methods, writes one CSV per method plus `report.csv` and
/// `deltas.csv`. A failing method is recorded and the others still run.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    opts.quadrature.validate()?;
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| scenario.output.clone());
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let timed = |method: Method| {
        let start = Instant::now();
        let result = compute_method(scenario, method, &opts.quadrature);
        (method, result, start.elapsed().as_secs_f64())
    };
    let results: Vec<_> = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = scenario.methods.iter().map(|&m| s.spawn(move || timed(m))).collect();
            handles.into_iter().map(|h| h.join().expect("method thread panicked")).collect()
        })
    } else {
        scenario.methods.iter().map(|&m| timed(m)).collect()
    };

    let grid = scenario.grid.points();
    let exact = results.iter().find_map(|(m, r, _)| match (m, r) {
        (Method::Exact, Ok(t)) => Some(t.clone()),
        _ => None,
    });
    let mut methods = Vec::new();
    let mut trajectories = Vec::new();
    for (method, result, wall_seconds) in results {
        let outcome = match result {
            Ok(traj) => {
                write_trajectory(&out_dir, method, &grid, &traj, scenario.model.population_model())?;
                let stats = MethodStats {
                    max_trace_defect: traj.max_trace_defect(),
                    min_eigenvalue: traj.min_eigenvalue(),
                    max_dev_exact: exact
                        .as_ref()
                        .filter(|_| method != Method::Exact)
                        .map(|e| max_deviation(&traj, e)),
                    final_rho00: *traj.rho00().last().expect("grid has two points"),
                };
                trajectories.push((method, traj));
                Ok(stats)
            }
            Err(e) => {
                log::warn!("{method} failed: {e}");
                Err(e.to_string())
            }
        };
        methods.push(MethodReport {
            method,
            outcome,
            wall_seconds,
        });
    }

    let mut pairs = Vec::new();
    for (i, (a, ta)) in trajectories.iter().enumerate() {
        for (b, tb) in &trajectories[i + 1..] {
            let (mut worst, mut at_t) = (0.0, 0.0);
            for ((x, y), &t) in ta.rho00().iter().zip(tb.rho00()).zip(&grid) {
                if (x - y).abs() > worst {
                    worst = (x - y).abs();
                    at_t = t;
                }
            }
            pairs.push(PairDelta {
                a: *a,
                b: *b,
                max_abs_rho00: worst,
                at_t,
            });
        }
    }
    let report = RunReport {
        scenario: scenario.name.clone(),
        out_dir,
        methods,
        pairs,
        trajectories,
    };
    write_report(&report)?;
    Ok(report)
}

/// Seventeen significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn populations_csv(grid: &[f64], rho00: &[f64]) -> String {
    let mut out = String::from("t,rho00\n");
    for (t, p) in grid.iter().zip(rho00) {
        out.push_str(&format!("{},{}\n", format_value(*t), format_value(*p)));
    }
    out
}

fn states_csv(grid: &[f64], states: &[DensityMatrix]) -> String {
    let d = states.first().map_or(0, |s| s.dim());
    let mut out = String::from("t");
    for a in 0..d {
        for b in 0..d {
            out.push_str(&format!(",re_rho_{a}_{b},im_rho_{a}_{b}"));
        }
    }
    out.push('\n');
    for (t, s) in grid.iter().zip(states) {
        out.push_str(&format_value(*t));
        for a in 0..d {
            for b in 0..d {
                let z = s.get(a, b);
                out.push(',');
                out.push_str(&format_value(z.re));
                out.push(',');
                out.push_str(&format_value(z.im));
            }
        }
        out.push('\n');
    }
    out
}

fn write_trajectory(dir: &Path, method: Method, grid: &[f64], traj: &Trajectory, population_model: bool) -> Result<()> {
    match traj {
        Trajectory::States(states) => {
            write_file(&dir.join(format!("{method}.csv")), &states_csv(grid, states))?;
            if population_model {
                write_file(&dir.join(format!("{method}_rho00.csv")), &populations_csv(grid, &traj.rho00()))?;
            }
        }
        Trajectory::Populations(p) => write_file(&dir.join(format!("{method}.csv")), &populations_csv(grid, p))?,
    }
    Ok(())
}

fn write_report(report: &RunReport) -> Result<()> {
    let mut text = String::from("method,status,max_trace_defect,min_eigenvalue,max_dev_exact,final_rho00,wall_seconds,message\n");
    for m in &report.methods {
        match &m.outcome {
            Ok(s) => text.push_str(&format!(
                "{},ok,{},{},{},{},{:.3},\n",
                m.method,
                format_value(s.max_trace_defect),
                format_value(s.min_eigenvalue),
                s.max_dev_exact.map(format_value).unwrap_or_default(),
                format_value(s.final_rho00),
                m.wall_seconds
            )),
            Err(e) => text.push_str(&format!(
                "{},failed,,,,,{:.3},\"{}\"\n",
                m.method,
                m.wall_seconds,
                e.replace('"', "'")
            )),
        }
    }
    write_file(&report.out_dir.join("report.csv"), &text)?;
    let mut deltas = String::from("method_a,method_b,max_abs_rho00,at_t\n");
    for p in &report.pairs {
        deltas.push_str(&format!("{},{},{},{}\n", p.a, p.b, format_value(p.max_abs_rho00), format_value(p.at_t)));
    }
    write_file(&report.out_dir.join("deltas.csv"), &deltas)
}
