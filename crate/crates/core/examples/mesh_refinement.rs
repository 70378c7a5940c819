//! Red and newest-vertex-bisection refinement of the benchmark meshes.
//!
//! `cargo run --example mesh_refinement [out_dir]` writes plain-text dumps
//! of an L-shape mesh after rounds of bisecting every triangle touching
//! the re-entrant corner.

use std::path::PathBuf;

use glfem::{build_initial_mesh, DomainShape};

fn main() -> glfem::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/meshes".into()));
    std::fs::create_dir_all(&out).expect("create output directory");

    for shape in [DomainShape::LShape, DomainShape::SlitSquare, DomainShape::UnitSquare] {
        let mut mesh = build_initial_mesh(shape);
        print!("{shape:?}:");
        for _ in 0..4 {
            print!(" {}", mesh.n_triangles());
            mesh = mesh.red_refine();
        }
        println!(" triangles, min angle {:.2} deg", mesh.min_angle().to_degrees());
    }

    let mut mesh = build_initial_mesh(DomainShape::LShape).red_refine();
    for step in 0..8 {
        let marked: Vec<usize> = (0..mesh.n_triangles())
            .filter(|&t| mesh.triangles()[t].iter().any(|&v| mesh.vertices()[v] == [0.0, 0.0]))
            .collect();
        mesh = mesh.nvb_refine(&marked)?;
        mesh.check_conformity()?;
        let path = out.join(format!("lshape_nvb{step}.txt"));
        std::fs::write(&path, mesh.dump()).expect("write mesh dump");
        println!(
            "step {step}: marked {:4}, triangles {:5}, area {:.12}, min angle {:.2} deg",
            marked.len(),
            mesh.n_triangles(),
            mesh.total_area(),
            mesh.min_angle().to_degrees()
        );
    }
    println!("dumps in {}", out.display());
    Ok(())
}
