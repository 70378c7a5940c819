//! Per-entity estimator contributions and the Dörfler marked set on one
//! L-shape mesh, written as CSV.
//!
//! `cargo run --release --example estimator_map`

use std::sync::Arc;

use glfem::adapt::{dorfler_mark, element_indicator, solve_level};
use glfem::estimator::estimate_for;
use glfem::problems::lshape_problem;
use glfem::solver::{InitialGuess, NewtonConfig};
use glfem::{build_initial_mesh, DomainShape, Method, MethodConfig, Space};

fn main() -> glfem::Result<()> {
    let eps = 0.4;
    let problem = lshape_problem(eps)?;
    let mesh = Arc::new(build_initial_mesh(DomainShape::LShape).red_refine().red_refine().red_refine());
    let space = Space::continuous(mesh.clone());
    let cfg = MethodConfig::new(Method::Nitsche, eps);
    let (psi, _) = solve_level(&problem, &space, &cfg, &NewtonConfig::default(), None, InitialGuess::Laplace)?;
    let breakdown = estimate_for(&psi, &cfg, problem.boundary(), problem.source())?;
    let indicators = element_indicator(&breakdown, &mesh)?;
    let marked = dorfler_mark(&indicators, 0.3)?;

    std::fs::create_dir_all("out").expect("create out");
    let boundary: Vec<bool> = mesh.edges().iter().map(|e| e.is_boundary()).collect();
    breakdown
        .write_csv(std::fs::File::create("out/estimator.csv").expect("create file"), &boundary)
        .expect("write estimator");
    let mut marks = String::from("triangle,centroid_x,centroid_y,indicator,marked\n");
    for (t, v) in indicators.iter().enumerate() {
        let c = mesh.geometry(t).centroid();
        marks += &format!("{t},{},{},{v:e},{}\n", c[0], c[1], u8::from(marked.binary_search(&t).is_ok()));
    }
    std::fs::write("out/indicators.csv", marks).expect("write indicators");

    println!("estimator {:.5} over {} triangles", breakdown.total, mesh.n_triangles());

    let far = marked
        .iter()
        .map(|&t| {
            let c = mesh.geometry(t).centroid();
            c[0].hypot(c[1])
        })
        .fold(0.0f64, f64::max);
    println!("{} triangles marked, farthest centroid {far:.3} from the re-entrant corner", marked.len());
    Ok(())
}
