//! SOLVE, ESTIMATE, MARK, REFINE with Dörfler marking and newest vertex
//! bisection.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimator::{estimate_for, EstimatorBreakdown};
use crate::fespace::{discrete_norm, energy_functional, l2_norm, prolong, Difference, Field, Space};
use crate::forms::{MethodConfig, NonlinearSystem};
use crate::mesh::{build_initial_mesh, Mesh};
use crate::problems::ProblemSpec;
use crate::solver::{newton_solve, InitialGuess, NewtonConfig, NewtonReport};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdaptConfig {
    pub theta: f64,
    pub max_levels: usize,
    pub target_ndof: Option<usize>,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            theta: 0.3,
            max_levels: 8,
            target_ndof: None,
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("Dörfler theta must lie in (0, 1], got {}", self.theta)));
        }
        if self.max_levels == 0 {
            return Err(Error::Config("max_levels must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub ndof: usize,
    pub n_triangles: usize,
    pub h_max: f64,
    pub err_energy: Option<f64>,
    pub err_l2: Option<f64>,
    pub estimator: f64,
    pub energy: f64,
    pub newton: NewtonReport,
    pub order_e: Option<f64>,
    pub order_est: Option<f64>,
    pub c_eff: Option<f64>,
}

/// `log(a_prev / a) / log(n / n_prev)`, the decay order in `n`.
pub fn order(prev: f64, cur: f64, n_prev: f64, n_cur: f64) -> f64 {
    (prev / cur).ln() / (n_cur / n_prev).ln()
}

/// `Xi_T^2 = theta_T^2 + sum of the squared terms of every edge of T`.
pub fn element_indicator(breakdown: &EstimatorBreakdown, mesh: &Mesh) -> Result<Vec<f64>> {
    if breakdown.mesh_id != mesh.id()
        || breakdown.theta_t.len() != mesh.n_triangles()
        || breakdown.theta_ei.len() != mesh.n_edges()
        || breakdown.theta_ebd.len() != mesh.n_edges()
    {
        return Err(Error::Consistency("estimator breakdown was computed on another mesh".into()));
    }
    Ok(mesh
        .triangle_edges()
        .iter()
        .enumerate()
        .map(|(t, edges)| {
            let mut s = breakdown.theta_t[t].powi(2);
            for &e in edges {
                s += breakdown.theta_ei[e].powi(2) + breakdown.theta_ebd[e].powi(2);
            }
            s.sqrt()
        })
        .collect())
}

/// Ids visited in descending indicator order, ties by ascending id.
fn descending(indicators: &[f64]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..indicators.len()).collect();
    ids.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    ids
}

/// Smallest greedy prefix (descending indicators) whose squared sum reaches
/// `theta` times the total. The total is summed in the same order. Returned
/// ids are sorted ascending.
pub fn dorfler_mark(indicators: &[f64], theta: f64) -> Result<Vec<usize>> {
    if indicators.is_empty() {
        return Err(Error::Config("cannot mark on an empty mesh".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Config(format!("Dörfler theta must lie in (0, 1], got {theta}")));
    }
    if indicators.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Consistency("indicators must be finite and nonnegative".into()));
    }
    let order = descending(indicators);
    let total: f64 = order.iter().map(|&t| indicators[t].powi(2)).sum();
    let goal = theta * total;
    let mut marked = Vec::new();
    let mut acc = 0.0;
    for &t in &order {
        if acc >= goal && !marked.is_empty() {
            break;
        }
        if indicators[t] == 0.0 {
            break;
        }
        acc += indicators[t].powi(2);
        marked.push(t);
    }
    marked.sort_unstable();
    Ok(marked)
}

/// Solution, record, and the refined mesh with its parent map.
type LevelOutcome = (Field, LevelRecord, Option<(Arc<Mesh>, Vec<usize>)>);

/// What the loop saw on one level, handed to observers.
pub struct LevelState<'a> {
    pub level: usize,
    pub mesh: &'a Arc<Mesh>,
    pub solution: &'a Field,
    pub breakdown: &'a EstimatorBreakdown,
    pub indicators: &'a [f64],
    pub marked: &'a [usize],
    /// The refined mesh and each child's parent, absent on the last level.
    pub refined: Option<(&'a Arc<Mesh>, &'a [usize])>,
}

#[derive(Debug)]
pub struct AdaptiveRun {
    pub records: Vec<LevelRecord>,
    pub solution: Option<Field>,
    /// Set when a level failed; `records` then holds the completed levels.
    pub failure: Option<Error>,
}

impl AdaptiveRun {
    pub fn into_result(self) -> Result<Vec<LevelRecord>> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self.records),
        }
    }
}

/// Solves on `space`, warm-started from `previous` when given, else from
/// `initial`.
pub fn solve_level(
    problem: &ProblemSpec,
    space: &Space,
    cfg: &MethodConfig,
    ncfg: &NewtonConfig,
    previous: Option<Field>,
    initial: InitialGuess,
) -> Result<(Field, NewtonReport)> {
    let system = NonlinearSystem::new(space.clone(), *cfg, problem.boundary(), problem.source())?;
    let guess = match previous {
        Some(f) => f,
        None => initial.build(space, cfg, problem.boundary(), problem.source())?,
    };
    newton_solve(&system, guess, ncfg)
}

pub(crate) fn errors(problem: &ProblemSpec, psi: &Field, cfg: &MethodConfig) -> Result<(Option<f64>, Option<f64>)> {
    match &problem.exact {
        Some(exact) => {
            let diff = Difference { exact, field: psi };
            Ok((Some(discrete_norm(&diff, cfg.method, cfg.sigma)?), Some(l2_norm(&diff))))
        }
        None => Ok((None, None)),
    }
}

/// The loop starting from `mesh`. Levels stop at `max_levels` or once the
/// next mesh would exceed `target_ndof`.
pub fn adaptive_loop_from(
    problem: &ProblemSpec,
    mesh: Arc<Mesh>,
    cfg: &MethodConfig,
    ncfg: &NewtonConfig,
    acfg: &AdaptConfig,
    initial: InitialGuess,
    mut observer: impl FnMut(&LevelState<'_>),
) -> AdaptiveRun {
    let mut run = AdaptiveRun {
        records: Vec::new(),
        solution: None,
        failure: None,
    };
    if let Err(e) = cfg.validate().and(ncfg.validate()).and(acfg.validate()) {
        run.failure = Some(e);
        return run;
    }
    let mut mesh = mesh;
    let mut previous: Option<Field> = None;
    for level in 0..acfg.max_levels {
        let step = (|| -> Result<LevelOutcome> {
            let space = Space::new(cfg.method.space_kind(), mesh.clone());
            let warm = match previous.take() {
                Some(p) => Some(prolong(&p, &space)?),
                None => None,
            };
            let (psi, report) = solve_level(problem, &space, cfg, ncfg, warm, initial)?;
            let breakdown = estimate_for(&psi, cfg, problem.boundary(), problem.source())?;
            let indicators = element_indicator(&breakdown, &mesh)?;
            let (err_energy, err_l2) = errors(problem, &psi, cfg)?;
            let record = LevelRecord {
                level,
                ndof: space.dof_count(),
                n_triangles: mesh.n_triangles(),
                h_max: mesh.max_diameter(),
                err_energy,
                err_l2,
                estimator: breakdown.total,
                energy: energy_functional(&psi, cfg.epsilon)?,
                newton: report,
                order_e: None,
                order_est: None,
                c_eff: err_energy.map(|e| breakdown.total / e),
            };
            let last = level + 1 == acfg.max_levels;
            let marked = dorfler_mark(&indicators, acfg.theta)?;
            let refined = if last {
                None
            } else {
                let (next, parents) = mesh.nvb_refine_with_parents(&marked)?;
                let next = Arc::new(next);
                let next_ndof = Space::new(cfg.method.space_kind(), next.clone()).dof_count();
                if acfg.target_ndof.is_some_and(|cap| next_ndof > cap) {
                    None
                } else {
                    Some((next, parents))
                }
            };
            observer(&LevelState {
                level,
                mesh: &mesh,
                solution: &psi,
                breakdown: &breakdown,
                indicators: &indicators,
                marked: &marked,
                refined: refined.as_ref().map(|(m, p)| (m, p.as_slice())),
            });
            Ok((psi, record, refined))
        })();
        match step {
            Ok((psi, mut record, refined)) => {
                if let Some(prev) = run.records.last() {
                    let (n0, n1) = (prev.ndof as f64, record.ndof as f64);
                    record.order_e = match (prev.err_energy, record.err_energy) {
                        (Some(a), Some(b)) => Some(order(a, b, n0, n1)),
                        _ => None,
                    };
                    record.order_est = Some(order(prev.estimator, record.estimator, n0, n1));
                }
                run.records.push(record);
                match refined {
                    Some((next, _)) => {
                        mesh = next;
                        previous = Some(psi);
                    }
                    None => {
                        run.solution = Some(psi);
                        break;
                    }
                }
            }
            Err(e) => {
                run.failure = Some(e);
                break;
            }
        }
    }
    run
}

/// The loop on the problem's standard coarse mesh refined `start_level`
/// times uniformly.
pub fn adaptive_loop(
    problem: &ProblemSpec,
    cfg: &MethodConfig,
    ncfg: &NewtonConfig,
    acfg: &AdaptConfig,
    start_level: usize,
    initial: InitialGuess,
) -> AdaptiveRun {
    let mut mesh = build_initial_mesh(problem.shape);
    for _ in 0..start_level {
        mesh = mesh.red_refine();
    }
    adaptive_loop_from(problem, Arc::new(mesh), cfg, ncfg, acfg, initial, |_| {})
}
