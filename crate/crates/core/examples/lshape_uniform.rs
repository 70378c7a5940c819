//! Uniform convergence study on the L-shaped domain for both methods.
//!
//! `cargo run --release --example lshape_uniform [levels]`

use glfem::bench::{emit_outputs, run_uniform_study, ConvergenceTable, RefineMode, RunConfig};
use glfem::problems::ProblemKind;
use glfem::Method;

fn main() -> glfem::Result<()> {
    let levels = std::env::args().nth(1).map_or(5, |s| s.parse().expect("levels"));
    for method in [Method::Nitsche, Method::Dg] {
        let mut cfg = RunConfig::new(ProblemKind::Lshape, method, RefineMode::Uniform);
        cfg.levels = levels;
        let study = run_uniform_study(&cfg)?;
        println!("{}", method.as_str());
        if let ConvergenceTable::Uniform(rows) = &study.table {
            for r in rows {
                println!(
                    "  h {:.4} ndof {:7} energy err {:.5} ({}) L2 err {:.5} ({}) est {:.5}",
                    r.h,
                    r.ndof,
                    r.err_energy.unwrap_or(f64::NAN),
                    r.order_energy.map_or("-".into(), |o| format!("{o:.3}")),
                    r.err_l2.unwrap_or(f64::NAN),
                    r.order_l2.map_or("-".into(), |o| format!("{o:.3}")),
                    r.estimator
                );
            }
        }
        emit_outputs(&study, format!("out/lshape_uniform_{}", method.as_str()).as_ref())?;
    }
    Ok(())
}
