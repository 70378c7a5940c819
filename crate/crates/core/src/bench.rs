//! Convergence studies: uniform and adaptive runs, rate columns, and the
//! `convergence.csv` / `meta.json` / plot-script outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::adapt::{adaptive_loop_from, errors, solve_level, AdaptConfig};
use crate::error::{Error, Result};
use crate::estimator::estimate_for;
use crate::fespace::{discrete_norm, energy_functional, l2_norm, prolong, Field, Space};
use crate::forms::{Method, MethodConfig};
use crate::mesh::{build_initial_mesh, Mesh};
use crate::problems::{problem, ProblemKind};
use crate::solver::{DeviceState, InitialGuess, NewtonConfig, NewtonReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefineMode {
    Uniform,
    Adaptive,
}

impl RefineMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RefineMode::Uniform => "uniform",
            RefineMode::Adaptive => "adaptive",
        }
    }
}

impl FromStr for RefineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(RefineMode::Uniform),
            "adaptive" => Ok(RefineMode::Adaptive),
            other => Err(Error::Config(format!("unknown refinement mode {other:?}"))),
        }
    }
}

/// Every field that can change a number in the output. `out` and
/// `dump_meshes` only choose what is written.
pub const KNOBS: &[&str] = &[
    "problem",
    "method",
    "refine",
    "levels",
    "start_level",
    "epsilon",
    "sigma",
    "lambda",
    "newton_tol",
    "newton_max_iter",
    "theta",
    "state",
    "max_ndof",
];

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub method: Method,
    pub refine: RefineMode,
    /// Number of solved levels.
    pub levels: usize,
    /// Uniform refinements of the coarse mesh before the first level.
    pub start_level: usize,
    pub epsilon: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub theta: f64,
    /// Device state selecting the initial guess; device only.
    pub state: Option<DeviceState>,
    /// Adaptive runs stop before a mesh with more dofs than this.
    pub max_ndof: Option<usize>,
    pub out: Option<PathBuf>,
    pub dump_meshes: bool,
}

impl RunConfig {
    /// Defaults for a problem: eps 0.4 / 0.6 / 0.02, sigma 10, lambda 1,
    /// Newton tolerance 1e-8 (1e-6 for adaptive device runs), theta 0.3.
    pub fn new(problem: ProblemKind, method: Method, refine: RefineMode) -> Self {
        let (epsilon, start_level, levels) = match (problem, refine) {
            (ProblemKind::Lshape, RefineMode::Uniform) => (0.4, 1, 5),
            (ProblemKind::Lshape, RefineMode::Adaptive) => (0.4, 1, 30),
            (ProblemKind::Slit, RefineMode::Uniform) => (0.6, 0, 5),
            (ProblemKind::Slit, RefineMode::Adaptive) => (0.6, 0, 30),
            (ProblemKind::Device, RefineMode::Uniform) => (0.02, 6, 2),
            (ProblemKind::Device, RefineMode::Adaptive) => (0.02, 5, 30),
        };
        let device = problem == ProblemKind::Device;
        Self {
            problem,
            method,
            refine,
            levels,
            start_level,
            epsilon,
            sigma: 10.0,
            lambda: 1.0,
            newton_tol: if device && refine == RefineMode::Adaptive { 1e-6 } else { 1e-8 },
            newton_max_iter: 50,
            theta: 0.3,
            state: device.then_some(DeviceState::D1),
            max_ndof: None,
            out: None,
            dump_meshes: false,
        }
    }

    pub fn method_config(&self) -> MethodConfig {
        MethodConfig {
            method: self.method,
            sigma: self.sigma,
            lambda: self.lambda,
            epsilon: self.epsilon,
        }
    }

    pub fn newton_config(&self) -> NewtonConfig {
        NewtonConfig {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
            record_history: true,
        }
    }

    pub fn adapt_config(&self) -> AdaptConfig {
        AdaptConfig {
            theta: self.theta,
            max_levels: self.levels,
            target_ndof: self.max_ndof,
        }
    }

    pub fn initial_guess(&self) -> InitialGuess {
        match self.state {
            Some(s) => InitialGuess::Director(s),
            None => InitialGuess::Laplace,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.method_config().validate()?;
        self.newton_config().validate()?;
        if self.refine == RefineMode::Uniform && self.levels < 2 {
            return Err(Error::Config("a uniform study needs at least 2 levels".into()));
        }
        if self.refine == RefineMode::Adaptive {
            self.adapt_config().validate()?;
        }
        if self.state.is_some() && self.problem != ProblemKind::Device {
            return Err(Error::Config("a device state only applies to the device problem".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UniformRow {
    pub level: usize,
    pub h: f64,
    pub ndof: usize,
    /// Error against the exact solution, or for the device the difference
    /// to the prolonged previous level.
    pub err_energy: Option<f64>,
    pub err_l2: Option<f64>,
    pub order_energy: Option<f64>,
    pub order_l2: Option<f64>,
    pub estimator: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdaptiveRow {
    pub level: usize,
    pub ndof: usize,
    pub err_energy: Option<f64>,
    pub estimator: f64,
    pub order_e: Option<f64>,
    pub order_est: Option<f64>,
    pub c_eff: Option<f64>,
    pub newton_iters: usize,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ConvergenceTable {
    Uniform(Vec<UniformRow>),
    Adaptive(Vec<AdaptiveRow>),
}

pub const UNIFORM_HEADER: &str = "level,h,ndof,err_energy,err_l2,order_energy,order_l2,estimator,energy";
pub const ADAPTIVE_HEADER: &str = "level,ndof,err_energy,estimator,order_e,order_est,c_eff,newton_iters";

/// `log(e / e_prev) / log(h / h_prev)`.
pub fn h_order(e_prev: f64, e: f64, h_prev: f64, h: f64) -> f64 {
    (e / e_prev).ln() / (h / h_prev).ln()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {line}: {s:?} is not a number")))
}

fn parse_opt(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, line).map(Some)
    }
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {line}: {s:?} is not a count")))
}

impl ConvergenceTable {
    pub fn len(&self) -> usize {
        match self {
            ConvergenceTable::Uniform(r) => r.len(),
            ConvergenceTable::Adaptive(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ndofs(&self) -> Vec<usize> {
        match self {
            ConvergenceTable::Uniform(r) => r.iter().map(|r| r.ndof).collect(),
            ConvergenceTable::Adaptive(r) => r.iter().map(|r| r.ndof).collect(),
        }
    }

    /// Numbers use the shortest representation that parses back exactly;
    /// absent values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match self {
            ConvergenceTable::Uniform(rows) => {
                s.push_str(UNIFORM_HEADER);
                s.push('\n');
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{}",
                        r.level,
                        r.h,
                        r.ndof,
                        opt(r.err_energy),
                        opt(r.err_l2),
                        opt(r.order_energy),
                        opt(r.order_l2),
                        r.estimator,
                        r.energy
                    );
                }
            }
            ConvergenceTable::Adaptive(rows) => {
                s.push_str(ADAPTIVE_HEADER);
                s.push('\n');
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        r.level,
                        r.ndof,
                        opt(r.err_energy),
                        r.estimator,
                        opt(r.order_e),
                        opt(r.order_est),
                        opt(r.c_eff),
                        r.newton_iters
                    );
                }
            }
        }
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let width = match header {
            UNIFORM_HEADER => 9,
            ADAPTIVE_HEADER => 8,
            _ => return Err(Error::Parse(format!("unrecognized header {header:?}"))),
        };
        let mut table = if width == 9 {
            ConvergenceTable::Uniform(Vec::new())
        } else {
            ConvergenceTable::Adaptive(Vec::new())
        };
        for (i, line) in lines {
            let n = i + 1;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != width {
                return Err(Error::Parse(format!("line {n}: expected {width} fields, got {}", f.len())));
            }
            match &mut table {
                ConvergenceTable::Uniform(rows) => rows.push(UniformRow {
                    level: parse_usize(f[0], n)?,
                    h: parse_f64(f[1], n)?,
                    ndof: parse_usize(f[2], n)?,
                    err_energy: parse_opt(f[3], n)?,
                    err_l2: parse_opt(f[4], n)?,
                    order_energy: parse_opt(f[5], n)?,
                    order_l2: parse_opt(f[6], n)?,
                    estimator: parse_f64(f[7], n)?,
                    energy: parse_f64(f[8], n)?,
                }),
                ConvergenceTable::Adaptive(rows) => rows.push(AdaptiveRow {
                    level: parse_usize(f[0], n)?,
                    ndof: parse_usize(f[1], n)?,
                    err_energy: parse_opt(f[2], n)?,
                    estimator: parse_f64(f[3], n)?,
                    order_e: parse_opt(f[4], n)?,
                    order_est: parse_opt(f[5], n)?,
                    c_eff: parse_opt(f[6], n)?,
                    newton_iters: parse_usize(f[7], n)?,
                }),
            }
        }
        Ok(table)
    }
}

/// A finished study: the table plus what goes into the metadata.
#[derive(Debug)]
pub struct Study {
    pub config: RunConfig,
    pub table: ConvergenceTable,
    pub newton: Vec<NewtonReport>,
    /// Final solution.
    pub solution: Field,
    /// Mesh dumps per level when `dump_meshes` is set.
    pub mesh_dumps: Vec<String>,
}

fn start_mesh(cfg: &RunConfig, shape: crate::mesh::DomainShape) -> Mesh {
    let mut mesh = build_initial_mesh(shape);
    for _ in 0..cfg.start_level {
        mesh = mesh.red_refine();
    }
    mesh
}

/// Red-refines once per level and solves from scratch on each mesh. With an
/// exact solution the error columns hold the true errors; otherwise they
/// hold the norms of the difference to the previous level's solution.
pub fn run_uniform_study(cfg: &RunConfig) -> Result<Study> {
    if cfg.refine != RefineMode::Uniform {
        return Err(Error::Config("run_uniform_study needs refine = uniform".into()));
    }
    cfg.validate()?;
    let prob = problem(cfg.problem, cfg.epsilon)?;
    let mcfg = cfg.method_config();
    let ncfg = cfg.newton_config();
    let mut mesh = Arc::new(start_mesh(cfg, prob.shape));
    let mut rows: Vec<UniformRow> = Vec::with_capacity(cfg.levels);
    let mut newton = Vec::with_capacity(cfg.levels);
    let mut dumps = Vec::new();
    let mut previous: Option<Field> = None;
    for level in 0..cfg.levels {
        let space = Space::new(cfg.method.space_kind(), mesh.clone());
        let (psi, report) = solve_level(&prob, &space, &mcfg, &ncfg, None, cfg.initial_guess())?;
        let est = estimate_for(&psi, &mcfg, prob.boundary(), prob.source())?;
        let (err_energy, err_l2) = if prob.exact.is_some() {
            errors(&prob, &psi, &mcfg)?
        } else if let Some(prev) = &previous {
            let d = psi.minus(&prolong(prev, &space)?)?;
            (Some(discrete_norm(&d, mcfg.method, mcfg.sigma)?), Some(l2_norm(&d)))
        } else {
            (None, None)
        };
        let h = mesh.max_diameter();
        let (order_energy, order_l2) = match rows.last() {
            Some(p) => {
                let o = |a: Option<f64>, b: Option<f64>| match (a, b) {
                    (Some(a), Some(b)) => Some(h_order(a, b, p.h, h)),
                    _ => None,
                };
                (o(p.err_energy, err_energy), o(p.err_l2, err_l2))
            }
            None => (None, None),
        };
        rows.push(UniformRow {
            level,
            h,
            ndof: space.dof_count(),
            err_energy,
            err_l2,
            order_energy,
            order_l2,
            estimator: est.total,
            energy: energy_functional(&psi, cfg.epsilon)?,
        });
        newton.push(report);
        if cfg.dump_meshes {
            dumps.push(mesh.dump());
        }
        if level + 1 < cfg.levels {
            mesh = Arc::new(mesh.red_refine());
        }
        previous = Some(psi);
    }
    Ok(Study {
        config: cfg.clone(),
        table: ConvergenceTable::Uniform(rows),
        newton,
        solution: previous.expect("at least two levels"),
        mesh_dumps: dumps,
    })
}

/// The adaptive loop on the problem's coarse mesh refined `start_level`
/// times, solutions carried across levels by prolongation.
pub fn run_adaptive_study(cfg: &RunConfig) -> Result<Study> {
    if cfg.refine != RefineMode::Adaptive {
        return Err(Error::Config("run_adaptive_study needs refine = adaptive".into()));
    }
    cfg.validate()?;
    let prob = problem(cfg.problem, cfg.epsilon)?;
    let mesh = Arc::new(start_mesh(cfg, prob.shape));
    let mut dumps = Vec::new();
    let run = adaptive_loop_from(
        &prob,
        mesh,
        &cfg.method_config(),
        &cfg.newton_config(),
        &cfg.adapt_config(),
        cfg.initial_guess(),
        |state| {
            if cfg.dump_meshes {
                dumps.push(state.mesh.dump());
            }
        },
    );
    let solution = run.solution;
    let records = match run.failure {
        Some(e) => return Err(e),
        None => run.records,
    };
    let rows = records
        .iter()
        .map(|r| AdaptiveRow {
            level: r.level,
            ndof: r.ndof,
            err_energy: r.err_energy,
            estimator: r.estimator,
            order_e: r.order_e,
            order_est: r.order_est,
            c_eff: r.c_eff,
            newton_iters: r.newton.iterations,
        })
        .collect();
    Ok(Study {
        config: cfg.clone(),
        table: ConvergenceTable::Adaptive(rows),
        newton: records.into_iter().map(|r| r.newton).collect(),
        solution: solution.ok_or_else(|| Error::Consistency("adaptive run produced no solution".into()))?,
        mesh_dumps: dumps,
    })
}

pub fn run_study(cfg: &RunConfig) -> Result<Study> {
    match cfg.refine {
        RefineMode::Uniform => run_uniform_study(cfg),
        RefineMode::Adaptive => run_adaptive_study(cfg),
    }
}

pub fn meta_json(study: &Study) -> serde_json::Value {
    let cfg = &study.config;
    let warm_start = match cfg.refine {
        RefineMode::Uniform => "none: every level starts from the initial guess",
        RefineMode::Adaptive => "prolongation of the previous level's solution",
    };
    let initial = match cfg.initial_guess() {
        InitialGuess::Laplace => "linear problem with the same data".to_string(),
        InitialGuess::Director(s) => format!("director field of state {s}"),
    };
    serde_json::json!({
        "library": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "lambda": cfg.lambda,
        "lambda_used": cfg.method == Method::Dg,
        "warm_start": warm_start,
        "initial_guess": initial,
        "bisection_depth": match cfg.refine {
            RefineMode::Adaptive => serde_json::Value::from("one bisection per marked triangle plus closure"),
            RefineMode::Uniform => serde_json::Value::Null,
        },
        "quadrature": {
            "assembly_and_energy": "triangle degree 4",
            "errors_and_estimator": "triangle degree 6",
            "edges": "3-point Gauss",
        },
        "ndof": study.table.ndofs(),
        "newton": study.newton,
    })
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `convergence.csv`, `meta.json`, `plot_convergence.py`, the final
/// solution as `solution.csv` and any mesh dumps into `dir`.
pub fn emit_outputs(study: &Study, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let p = dir.join(name);
        write(&p, &bytes)?;
        written.push(p);
        Ok(())
    };
    put("convergence.csv".into(), study.table.to_csv().into_bytes())?;
    let meta = serde_json::to_string_pretty(&meta_json(study)).map_err(|e| Error::Parse(e.to_string()))?;
    put("meta.json".into(), (meta + "\n").into_bytes())?;
    put("plot_convergence.py".into(), plot_script(&study.table).into_bytes())?;
    let mut buf = Vec::new();
    study
        .solution
        .write_csv(&mut buf)
        .map_err(|e| Error::io(dir.join("solution.csv"), e))?;
    put("solution.csv".into(), buf)?;
    for (level, dump) in study.mesh_dumps.iter().enumerate() {
        put(format!("mesh_level{level:02}.txt"), dump.clone().into_bytes())?;
    }
    Ok(written)
}

/// A matplotlib script reading `convergence.csv` next to it.
pub fn plot_script(table: &ConvergenceTable) -> String {
    let (x, xlabel, series) = match table {
        ConvergenceTable::Uniform(_) => ("h", "h", "[\"err_energy\", \"err_l2\", \"estimator\"]"),
        ConvergenceTable::Adaptive(_) => ("ndof", "Ndof", "[\"err_energy\", \"estimator\"]"),
    };
    format!(
        r#"#!/usr/bin/env python3
"""Log-log plot of the columns of convergence.csv."""
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "convergence.csv", newline="")))
x_key = "{x}"
fig, ax = plt.subplots(figsize=(5, 4))
for key in {series}:
    pts = [(float(r[x_key]), float(r[key])) for r in rows if r[key]]
    if pts:
        xs, ys = zip(*pts)
        ax.loglog(xs, ys, "o-", label=key)
ax.set_xlabel("{xlabel}")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
out = here / (sys.argv[1] if len(sys.argv) > 1 else "convergence.png")
fig.savefig(out, dpi=150)
print(out)
"#
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(refine: RefineMode, method: Method) -> RunConfig {
        let mut c = RunConfig::new(ProblemKind::Lshape, method, refine);
        c.start_level = 0;
        c.levels = 3;
        c
    }

    #[test]
    fn uniform_csv_round_trip_and_rates() {
        let study = run_uniform_study(&quick(RefineMode::Uniform, Method::Nitsche)).unwrap();
        let csv = study.table.to_csv();
        assert!(csv.starts_with(UNIFORM_HEADER));
        assert_eq!(ConvergenceTable::parse_csv(&csv).unwrap(), study.table);
        let ConvergenceTable::Uniform(rows) = &study.table else { panic!() };
        for w in rows.windows(2) {
            let o = h_order(w[0].err_energy.unwrap(), w[1].err_energy.unwrap(), w[0].h, w[1].h);
            assert!((o - w[1].order_energy.unwrap()).abs() < 1e-9);
            assert!(w[1].ndof > w[0].ndof);
        }
        assert!(rows[0].order_energy.is_none());
    }

    #[test]
    fn adaptive_csv_round_trip() {
        let study = run_adaptive_study(&quick(RefineMode::Adaptive, Method::Dg)).unwrap();
        let csv = study.table.to_csv();
        assert!(csv.starts_with(ADAPTIVE_HEADER));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(ConvergenceTable::parse_csv(&csv).unwrap(), study.table);
    }

    #[test]
    fn knobs_are_echoed() {
        let mut cfg = RunConfig::new(ProblemKind::Device, Method::Dg, RefineMode::Adaptive);
        cfg.max_ndof = Some(1000);
        let v = serde_json::to_value(&cfg).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        for k in KNOBS {
            assert!(keys.iter().any(|x| x == k), "{k} missing");
        }
        for k in keys {
            assert!(KNOBS.contains(&k.as_str()) || k == "out" || k == "dump_meshes", "{k} not registered");
        }
        assert_eq!(cfg.newton_tol, 1e-6);
    }

    #[test]
    fn bad_configs_rejected() {
        let mut c = RunConfig::new(ProblemKind::Lshape, Method::Nitsche, RefineMode::Uniform);
        c.levels = 1;
        assert!(run_uniform_study(&c).is_err());
        let mut c = RunConfig::new(ProblemKind::Slit, Method::Nitsche, RefineMode::Uniform);
        c.state = Some(DeviceState::R1);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        assert!(ConvergenceTable::parse_csv("a,b\n").is_err());
        assert!(ConvergenceTable::parse_csv(&format!("{ADAPTIVE_HEADER}\n1,2,x,3,,,,4\n")).is_err());
        assert!("adaptive".parse::<RefineMode>().is_ok() && "red".parse::<RefineMode>().is_err());
    }
}
