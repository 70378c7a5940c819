//! The square-well device: the six states from director-field initial
//! guesses and their discrete energies.
//!
//! `cargo run --release --example device_states [refinements]`

use std::sync::Arc;

use glfem::fespace::energy_functional;
use glfem::problems::device_problem;
use glfem::solver::{initial_guess_director, newton_solve, DeviceState, NewtonConfig};
use glfem::{build_initial_mesh, DomainShape, Method, MethodConfig, NonlinearSystem, Space};

fn main() -> glfem::Result<()> {
    let refinements = std::env::args().nth(1).map_or(6, |s| s.parse().expect("refinements"));
    let eps = 0.02;
    let problem = device_problem(eps)?;
    let mut mesh = build_initial_mesh(DomainShape::UnitSquare);
    for _ in 0..refinements {
        mesh = mesh.red_refine();
    }
    let space = Space::continuous(Arc::new(mesh));
    let cfg = MethodConfig::new(Method::Nitsche, eps);
    let system = NonlinearSystem::new(space.clone(), cfg, problem.boundary(), None)?;
    println!("h {:.4}, ndof {}", space.mesh().max_diameter(), space.dof_count());
    for state in DeviceState::ALL {
        let guess = initial_guess_director(&space, problem.boundary(), state)?;
        let (psi, report) = newton_solve(&system, guess, &NewtonConfig::default())?;
        let n = space.n_nodes();
        let centre = space
            .mesh()
            .vertices()
            .iter()
            .position(|p| *p == [0.5, 0.5])
            .map(|v| [psi.coefficients()[v], psi.coefficients()[n + v]]);
        println!(
            "{state}: energy {:.4}, newton iterations {}, value at centre {:?}",
            energy_functional(&psi, eps)?,
            report.iterations,
            centre
        );
        let path = format!("out/device_{state}.csv");
        std::fs::create_dir_all("out").expect("create out");
        psi.write_csv(std::fs::File::create(&path).expect("create solution file"))
            .expect("write solution");
    }
    Ok(())
}
