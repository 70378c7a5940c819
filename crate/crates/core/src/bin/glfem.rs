use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use glfem::bench::{emit_outputs, run_study, ConvergenceTable, RefineMode, RunConfig};
use glfem::problems::ProblemKind;
use glfem::solver::DeviceState;
use glfem::Method;

/// Convergence studies for the Ginzburg-Landau benchmarks.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// lshape, slit or device.
    #[arg(long, value_parser = parse::<ProblemKind>)]
    problem: ProblemKind,
    /// nitsche or dg.
    #[arg(long, default_value = "nitsche", value_parser = parse::<Method>)]
    method: Method,
    /// uniform or adaptive.
    #[arg(long, default_value = "uniform", value_parser = parse::<RefineMode>)]
    refine: RefineMode,
    /// Number of solved levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Uniform refinements of the coarse mesh before the first level.
    #[arg(long)]
    start_level: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
    /// Symmetry parameter, dG only.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Defaults to 1e-8, or 1e-6 for adaptive device runs.
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long, default_value_t = 50)]
    newton_max_iter: usize,
    /// Dörfler bulk parameter.
    #[arg(long, default_value_t = 0.3)]
    theta: f64,
    /// D1, D2, R1, R2, R3 or R4; device only.
    #[arg(long, value_parser = parse::<DeviceState>)]
    state: Option<DeviceState>,
    /// Stop an adaptive run before a mesh with more dofs than this.
    #[arg(long)]
    max_ndof: Option<usize>,
    /// Write one mesh dump per level.
    #[arg(long)]
    dump_meshes: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse<T: std::str::FromStr<Err = glfem::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: glfem::Error| e.to_string())
}

fn config(cli: &Cli) -> RunConfig {
    let mut cfg = RunConfig::new(cli.problem, cli.method, cli.refine);
    if let Some(v) = cli.levels {
        cfg.levels = v;
    }
    if let Some(v) = cli.start_level {
        cfg.start_level = v;
    }
    if let Some(v) = cli.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = cli.newton_tol {
        cfg.newton_tol = v;
    }
    if cli.state.is_some() {
        cfg.state = cli.state;
    }
    cfg.sigma = cli.sigma;
    cfg.lambda = cli.lambda;
    cfg.newton_max_iter = cli.newton_max_iter;
    cfg.theta = cli.theta;
    cfg.max_ndof = cli.max_ndof;
    cfg.dump_meshes = cli.dump_meshes;
    cfg.out = Some(cli.out.clone());
    cfg
}

fn print_table(table: &ConvergenceTable) {
    let f = |v: Option<f64>| v.map(|x| format!("{x:.5}")).unwrap_or_else(|| "-".into());
    match table {
        ConvergenceTable::Uniform(rows) => {
            println!("{:>5} {:>8} {:>8} {:>10} {:>10} {:>8} {:>8} {:>10} {:>12}", "level", "h", "ndof", "err_e", "err_l2", "ord_e", "ord_l2", "est", "energy");
            for r in rows {
                println!(
                    "{:>5} {:>8.5} {:>8} {:>10} {:>10} {:>8} {:>8} {:>10.5} {:>12.6}",
                    r.level,
                    r.h,
                    r.ndof,
                    f(r.err_energy),
                    f(r.err_l2),
                    f(r.order_energy),
                    f(r.order_l2),
                    r.estimator,
                    r.energy
                );
            }
        }
        ConvergenceTable::Adaptive(rows) => {
            println!("{:>5} {:>8} {:>10} {:>10} {:>8} {:>8} {:>8} {:>6}", "level", "ndof", "err_e", "est", "ord_e", "ord_est", "c_eff", "newton");
            for r in rows {
                println!(
                    "{:>5} {:>8} {:>10} {:>10.5} {:>8} {:>8} {:>8} {:>6}",
                    r.level,
                    r.ndof,
                    f(r.err_energy),
                    r.estimator,
                    f(r.order_e),
                    f(r.order_est),
                    f(r.c_eff),
                    r.newton_iters
                );
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = config(&cli);
    let study = match run_study(&cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    print_table(&study.table);
    match emit_outputs(&study, &cli.out) {
        Ok(files) => {
            for p in files.iter().take(3) {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
