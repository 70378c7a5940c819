//! Finite element solver for the two-component Ginzburg-Landau system
//! `-Laplace(Psi) + 2 eps^-2 (|Psi|^2 - 1) Psi = f` with Dirichlet data imposed
//! weakly, either by Nitsche's method on continuous P1 elements or by a
//! symmetric interior penalty dG method on discontinuous P1 elements.
//!
//! The crate provides meshes with red and newest-vertex-bisection
//! refinement, assembly of all forms, a Newton solver, residual error
//! estimators, an adaptive loop with Dörfler marking, and the benchmark
//! problems together with a convergence-study harness.

#![allow(clippy::needless_range_loop)]

pub mod adapt;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod fespace;
pub mod forms;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use fespace::{ExactSolution, Field, Space, SpaceKind};
pub use forms::{Method, MethodConfig, NonlinearSystem, SparseOperator};
pub use mesh::{build_initial_mesh, DomainShape, Mesh};
