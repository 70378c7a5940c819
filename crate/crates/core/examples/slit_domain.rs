//! The slit domain: uniform rates for Nitsche's method, and adaptive dG
//! refinement recovering the optimal rate.
//!
//! `cargo run --release --example slit_domain`

use glfem::bench::{run_adaptive_study, run_uniform_study, ConvergenceTable, RefineMode, RunConfig};
use glfem::problems::ProblemKind;
use glfem::Method;

fn main() -> glfem::Result<()> {
    let mut cfg = RunConfig::new(ProblemKind::Slit, Method::Nitsche, RefineMode::Uniform);
    cfg.levels = 5;
    let study = run_uniform_study(&cfg)?;
    if let ConvergenceTable::Uniform(rows) = &study.table {
        for r in rows {
            println!(
                "uniform ndof {:6} energy err {:.5} order {:>6} L2 err {:.6} order {:>6}",
                r.ndof,
                r.err_energy.unwrap_or(f64::NAN),
                r.order_energy.map_or("-".into(), |o| format!("{o:.3}")),
                r.err_l2.unwrap_or(f64::NAN),
                r.order_l2.map_or("-".into(), |o| format!("{o:.3}")),
            );
        }
    }

    let mut cfg = RunConfig::new(ProblemKind::Slit, Method::Dg, RefineMode::Adaptive);
    cfg.epsilon = 1.0;
    cfg.levels = 60;
    cfg.max_ndof = Some(40_000);
    let study = run_adaptive_study(&cfg)?;
    if let ConvergenceTable::Adaptive(rows) = &study.table {
        let (a, b) = (&rows[rows.len() / 2], &rows[rows.len() - 1]);
        let slope = (a.err_energy.unwrap() / b.err_energy.unwrap()).ln() / (b.ndof as f64 / a.ndof as f64).ln();
        println!(
            "adaptive dG, eps 1: {} levels, ndof {} -> {}, error {:.5} -> {:.5}, order in Ndof {slope:.3}",
            rows.len(),
            a.ndof,
            b.ndof,
            a.err_energy.unwrap(),
            b.err_energy.unwrap()
        );
    }
    Ok(())
}
