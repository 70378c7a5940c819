//! Newton increments on the L-shape problem, showing quadratic decay, and
//! the same iteration written as a fixed-point step.
//!
//! `cargo run --release --example newton_convergence`

use std::sync::Arc;

use glfem::problems::lshape_problem;
use glfem::solver::{fixed_point_step, initial_guess_laplace, newton_solve, NewtonConfig};
use glfem::{build_initial_mesh, DomainShape, Method, MethodConfig, NonlinearSystem, Space};

fn main() -> glfem::Result<()> {
    let eps = 0.4;
    let problem = lshape_problem(eps)?;
    let mesh = build_initial_mesh(DomainShape::LShape).red_refine().red_refine();
    for method in [Method::Nitsche, Method::Dg] {
        let space = Space::new(method.space_kind(), Arc::new(mesh.clone()));
        let cfg = MethodConfig::new(method, eps);
        let system = NonlinearSystem::new(space.clone(), cfg, problem.boundary(), problem.source())?;
        let guess = initial_guess_laplace(&space, &cfg, problem.boundary(), problem.source())?;
        let (_, report) = newton_solve(&system, guess.clone(), &NewtonConfig::default())?;
        println!("{} ({} dofs)", method.as_str(), space.dof_count());
        let norms = &report.increment_norms;
        for (k, e) in norms.iter().enumerate() {
            let ratio = if k > 0 { format!("{:.3e}", e / norms[k - 1].powi(2)) } else { "-".into() };
            println!("  iteration {:2}: increment {e:.3e}, e_k / e_(k-1)^2 {ratio}", k + 1);
        }
        let mut psi = guess;
        for _ in 0..report.iterations {
            psi = fixed_point_step(&system, &psi)?;
        }
        let r = system.residual(&psi)?;
        println!("  fixed-point form, same number of steps: max residual {:.2e}", r.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    Ok(())
}
