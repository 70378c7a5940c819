//! Newton's method for the discrete problem and the initial guesses.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fespace::{discrete_norm, interpolate, Field, Space};
use crate::forms::{assemble_a, assemble_load, MethodConfig, NonlinearSystem};
use crate::mesh::Point;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            record_history: true,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("Newton tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Discrete norm of each increment; empty unless history is recorded,
    /// except for the last entry which is always kept.
    pub increment_norms: Vec<f64>,
    pub converged: bool,
    /// Max-norm of the residual at the returned iterate.
    pub final_residual: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Solution of the linear problem `A(psi, phi) = L(phi)` with the same data.
pub fn initial_guess_laplace(
    space: &Space,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<Field> {
    let a = assemble_a(space, cfg)?;
    let l = assemble_load(space, cfg, g, f)?;
    Field::new(space.clone(), a.solve(&l)?)
}

/// Director configurations of the square well.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum DeviceState {
    D1,
    D2,
    R1,
    R2,
    R3,
    R4,
}

impl DeviceState {
    pub const ALL: [DeviceState; 6] = [
        DeviceState::D1,
        DeviceState::D2,
        DeviceState::R1,
        DeviceState::R2,
        DeviceState::R3,
        DeviceState::R4,
    ];

    /// Director angle field of the state.
    pub fn director_angle(self, p: Point) -> f64 {
        let [x, y] = p;
        match self {
            DeviceState::D1 => PI / 4.0,
            DeviceState::D2 => 3.0 * PI / 4.0,
            DeviceState::R1 => PI * y,
            DeviceState::R2 => -PI * y,
            DeviceState::R3 => PI / 2.0 + PI * x,
            DeviceState::R4 => PI / 2.0 - PI * x,
        }
    }
}

impl fmt::Display for DeviceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for DeviceState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DeviceState::ALL
            .into_iter()
            .find(|d| d.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown device state {s:?}")))
    }
}

/// `(cos 2 theta_d, sin 2 theta_d)` at interior nodes, `g` at boundary nodes.
pub fn initial_guess_director(space: &Space, g: &dyn Fn(Point) -> [f64; 2], state: DeviceState) -> Result<Field> {
    let boundary = space.mesh().boundary_vertices();
    let tris = space.mesh().triangles();
    let n = space.n_nodes();
    let mut field = interpolate(space, &|p| {
        let t = state.director_angle(p);
        [(2.0 * t).cos(), (2.0 * t).sin()]
    })?;
    let verts = space.mesh().vertices();
    let coeffs = field.coefficients_mut();
    for node in 0..n {
        let v = match space.kind() {
            crate::fespace::SpaceKind::ContinuousP1 => node,
            crate::fespace::SpaceKind::DgP1 => tris[node / 3][node % 3],
        };
        if boundary[v] {
            let gv = g(verts[v]);
            coeffs[node] = gv[0];
            coeffs[n + node] = gv[1];
        }
    }
    Ok(field)
}

/// How the first iterate on a mesh is built when no previous solution is
/// available.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    /// Solution of the linear problem with the same data.
    Laplace,
    /// Director field of a device state, equal to `g` on the boundary.
    Director(DeviceState),
}

impl InitialGuess {
    pub fn build(
        self,
        space: &Space,
        cfg: &MethodConfig,
        g: &dyn Fn(Point) -> [f64; 2],
        f: Option<&dyn Fn(Point) -> [f64; 2]>,
    ) -> Result<Field> {
        match self {
            InitialGuess::Laplace => initial_guess_laplace(space, cfg, g, f),
            InitialGuess::Director(state) => initial_guess_director(space, g, state),
        }
    }
}

/// Newton's method on `N(psi; .) = 0`, stopping once the discrete norm of
/// the increment is at most `tol`.
pub fn newton_solve(system: &NonlinearSystem, guess: Field, ncfg: &NewtonConfig) -> Result<(Field, NewtonReport)> {
    ncfg.validate()?;
    if !guess.space().same_as(system.space()) {
        return Err(Error::SpaceMismatch("initial guess is not on the system's space".into()));
    }
    let cfg = system.config();
    let mut psi = guess;
    let mut report = NewtonReport::default();
    for k in 1..=ncfg.max_iter {
        let r = system.residual(&psi)?;
        let j = system.jacobian(&psi)?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = Field::new(psi.space().clone(), j.solve(&neg)?)?;
        let norm = discrete_norm(&delta, cfg.method, cfg.sigma)?;
        for (p, d) in psi.coefficients_mut().iter_mut().zip(delta.coefficients()) {
            *p += d;
        }
        if ncfg.record_history || norm <= ncfg.tol || k == ncfg.max_iter {
            report.increment_norms.push(norm);
        }
        report.iterations = k;
        if !norm.is_finite() {
            break;
        }
        if norm <= ncfg.tol {
            report.converged = true;
            report.final_residual = max_abs(&system.residual(&psi)?);
            return Ok((psi, report));
        }
    }
    report.final_residual = max_abs(&system.residual(&psi).unwrap_or_default());
    Err(Error::NonConvergence { report: Box::new(report) })
}

/// One step of the fixed-point form
/// `A(psi_n) + 3 B(psi, psi, psi_n) + C(psi_n) = 2 B(psi, psi, psi) + L`.
pub fn fixed_point_step(system: &NonlinearSystem, psi: &Field) -> Result<Field> {
    let j = system.jacobian(psi)?;
    let rhs = system.picard_rhs(psi)?;
    Field::new(psi.space().clone(), j.solve(&rhs)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::forms::Method;
    use crate::mesh::{build_initial_mesh, DomainShape, Mesh};
    use crate::problems::{device_problem, lshape_problem};

    fn square(levels: usize) -> Arc<Mesh> {
        let mut m = build_initial_mesh(DomainShape::UnitSquare);
        for _ in 0..levels {
            m = m.red_refine();
        }
        Arc::new(m)
    }

    #[test]
    fn laplace_guess_reproduces_constants() {
        for method in [Method::Nitsche, Method::Dg] {
            let space = Space::new(method.space_kind(), square(2));
            let cfg = MethodConfig::new(method, 1.0);
            let zero = initial_guess_laplace(&space, &cfg, &|_| [0.0, 0.0], None).unwrap();
            assert!(zero.coefficients().iter().all(|&c| c.abs() < 1e-14));
            let one = initial_guess_laplace(&space, &cfg, &|_| [1.0, 0.0], None).unwrap();
            let n = space.n_nodes();
            assert!(one.coefficients()[..n].iter().all(|&c| (c - 1.0).abs() < 1e-10));
            assert!(one.coefficients()[n..].iter().all(|&c| c.abs() < 1e-10));
        }
    }

    #[test]
    fn director_guess_center_and_boundary() {
        let space = Space::continuous(square(2));
        let p = device_problem(0.02).unwrap();
        let guess = initial_guess_director(&space, p.boundary(), DeviceState::D1).unwrap();
        let n = space.n_nodes();
        let boundary = space.mesh().boundary_vertices();
        for (v, x) in space.mesh().vertices().iter().enumerate() {
            let (u, w) = (guess.coefficients()[v], guess.coefficients()[n + v]);
            if boundary[v] {
                assert_eq!([u, w], (p.g)(*x));
            } else if *x == [0.5, 0.5] {
                assert!(u.abs() < 1e-15 && (w - 1.0).abs() < 1e-15);
            }
        }
        assert!("r3".parse::<DeviceState>().is_ok());
        assert!("R7".parse::<DeviceState>().is_err());
    }

    #[test]
    fn newton_fixed_point_and_step_equivalence() {
        let mut mesh = build_initial_mesh(DomainShape::LShape);
        mesh = mesh.red_refine();
        let space = Space::continuous(Arc::new(mesh));
        let prob = lshape_problem(0.4).unwrap();
        let cfg = MethodConfig::new(Method::Nitsche, 0.4);
        let sys = NonlinearSystem::new(space.clone(), cfg, prob.boundary(), prob.source()).unwrap();
        let guess = initial_guess_laplace(&space, &cfg, prob.boundary(), prob.source()).unwrap();

        let step = fixed_point_step(&sys, &guess).unwrap();
        let r = sys.residual(&guess).unwrap();
        let j = sys.jacobian(&guess).unwrap();
        let d = j.solve(&r.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
        for ((s, g), d) in step.coefficients().iter().zip(guess.coefficients()).zip(&d) {
            assert!((s - (g + d)).abs() < 1e-10);
        }

        let (sol, rep) = newton_solve(&sys, guess, &NewtonConfig::default()).unwrap();
        assert!(rep.converged && rep.final_residual <= 1e-7);
        let (_, again) = newton_solve(&sys, sol, &NewtonConfig::default()).unwrap();
        assert_eq!(again.iterations, 1);
        assert!(again.increment_norms[0] < 1e-8);
    }

    #[test]
    fn non_convergence_carries_history() {
        let space = Space::continuous(square(1));
        let prob = lshape_problem(0.4).unwrap();
        let cfg = MethodConfig::new(Method::Nitsche, 0.4);
        let sys = NonlinearSystem::new(space.clone(), cfg, prob.boundary(), None).unwrap();
        let guess = interpolate(&space, &|p| [3.0 * p[0], -2.0]).unwrap();
        let ncfg = NewtonConfig {
            tol: 1e-30,
            max_iter: 2,
            record_history: true,
        };
        match newton_solve(&sys, guess, &ncfg) {
            Err(Error::NonConvergence { report }) => {
                assert_eq!(report.iterations, 2);
                assert_eq!(report.increment_norms.len(), 2);
                assert!(!report.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
