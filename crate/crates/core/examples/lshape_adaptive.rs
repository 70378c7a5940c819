//! Adaptive refinement on the L-shaped domain compared with uniform
//! refinement at equal work.
//!
//! `cargo run --release --example lshape_adaptive [method]`

use glfem::bench::{emit_outputs, run_adaptive_study, ConvergenceTable, RefineMode, RunConfig};
use glfem::problems::ProblemKind;
use glfem::Method;

fn main() -> glfem::Result<()> {
    let method: Method = std::env::args().nth(1).map_or(Ok(Method::Nitsche), |s| s.parse())?;
    let mut cfg = RunConfig::new(ProblemKind::Lshape, method, RefineMode::Adaptive);
    cfg.max_ndof = Some(50_000);
    cfg.levels = 60;
    let study = run_adaptive_study(&cfg)?;
    let ConvergenceTable::Adaptive(rows) = &study.table else {
        unreachable!()
    };
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    for r in rows {
        println!(
            "level {:2} ndof {:6} err {:.5} est {:.5} order_e {:>7} order_est {:>7} c_eff {}",
            r.level,
            r.ndof,
            r.err_energy.unwrap_or(f64::NAN),
            r.estimator,
            fmt(r.order_e),
            fmt(r.order_est),
            fmt(r.c_eff)
        );
    }
    if let Some(r) = rows.iter().find(|r| r.err_energy.is_some_and(|e| e <= 0.03)) {
        println!("energy error below 0.03 first at ndof {}", r.ndof);
    }
    let dir = format!("out/lshape_adaptive_{}", method.as_str());
    emit_outputs(&study, dir.as_ref())?;
    println!("outputs in {dir}");
    Ok(())
}
