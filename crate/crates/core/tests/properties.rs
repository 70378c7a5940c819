use std::sync::Arc;

use glfem::adapt::dorfler_mark;
use glfem::estimator::estimate_for;
use glfem::fespace::{discrete_norm, embed_dg, energy_seminorm, prolong, restrict_dg_vector};
use glfem::forms::{assemble_a, assemble_b_bilinear, assemble_c, eval_b, jacobian, residual};
use glfem::problems::{device_problem, lshape_problem, slit_problem, trapezoid, ProblemSpec};
use glfem::{build_initial_mesh, DomainShape, Field, Method, MethodConfig, Mesh, Space};
use proptest::prelude::*;

const SHAPES: [DomainShape; 3] = [DomainShape::UnitSquare, DomainShape::LShape, DomainShape::SlitSquare];

fn refined(shape: DomainShape, levels: usize) -> Arc<Mesh> {
    let mut m = build_initial_mesh(shape);
    for _ in 0..levels {
        m = m.red_refine();
    }
    Arc::new(m)
}

fn field(space: &Space, raw: &[f64]) -> Field {
    let n = space.dof_count();
    Field::new(space.clone(), (0..n).map(|i| raw[i % raw.len()] * (1.0 + (i / raw.len()) as f64 * 0.1)).collect()).unwrap()
}

fn sum(a: &Field, b: &Field) -> Field {
    let c = a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| x + y).collect();
    Field::new(a.space().clone(), c).unwrap()
}

fn marks(mesh: &Mesh, bits: &[bool]) -> Vec<usize> {
    (0..mesh.n_triangles()).filter(|&t| bits[t % bits.len()]).collect()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn nvb_keeps_conformity_area_and_angles(
        shape in 0usize..3,
        rounds in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..13), 6),
    ) {
        let mut mesh = build_initial_mesh(SHAPES[shape]);
        let area = mesh.total_area();
        let floor = mesh.min_angle() / 2.0;
        for bits in &rounds {
            let marked = marks(&mesh, bits);
            let n_before = Space::continuous(Arc::new(mesh.clone())).dof_count();
            let (next, parents) = mesh.nvb_refine_with_parents(&marked).unwrap();
            prop_assert!(next.check_conformity().is_ok());
            prop_assert!(((next.total_area() - area) / area).abs() < 1e-12);
            prop_assert!(next.min_angle() >= floor - 1e-12);
            prop_assert!((0..next.n_triangles()).all(|t| next.geometry(t).area > 0.0));
            for &t in &marked {
                prop_assert!(parents.iter().filter(|&&p| p == t).count() >= 2, "marked {} not bisected", t);
            }
            let n_after = Space::continuous(Arc::new(next.clone())).dof_count();
            prop_assert!(n_after <= 4 * n_before);
            mesh = next;
        }
    }

    #[test]
    fn red_refinement_preserves_area(shape in 0usize..3, levels in 1usize..4) {
        let base = build_initial_mesh(SHAPES[shape]);
        let fine = refined(SHAPES[shape], levels);
        prop_assert!(fine.check_conformity().is_ok());
        prop_assert!(((fine.total_area() - base.total_area()) / base.total_area()).abs() < 1e-12);
        prop_assert_eq!(fine.n_triangles(), base.n_triangles() << (2 * levels));
    }

    #[test]
    fn dorfler_is_satisfied_and_minimal(
        values in prop::collection::vec(0.0f64..10.0, 1..60),
        theta in 0.05f64..1.0,
    ) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let marked = dorfler_mark(&values, theta).unwrap();
        let total: f64 = values.iter().map(|v| v * v).sum();
        let got: f64 = marked.iter().map(|&t| values[t] * values[t]).sum();
        prop_assert!(got >= theta * total * (1.0 - 1e-12));
        let smallest = marked.iter().map(|&t| values[t]).fold(f64::INFINITY, f64::min);
        prop_assert!(got - smallest * smallest < theta * total);
        prop_assert!(marked.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn discrete_norm_is_a_norm(
        a in prop::collection::vec(-2.0f64..2.0, 7),
        b in prop::collection::vec(-2.0f64..2.0, 5),
        dg in any::<bool>(),
    ) {
        let method = if dg { Method::Dg } else { Method::Nitsche };
        let space = Space::new(method.space_kind(), refined(DomainShape::LShape, 1));
        let (fa, fb) = (field(&space, &a), field(&space, &b));
        let n = |f: &Field| discrete_norm(f, method, 10.0).unwrap();
        prop_assert!(n(&sum(&fa, &fb)) <= n(&fa) + n(&fb) + 1e-12);
        prop_assert_eq!(n(&fa.minus(&fa).unwrap()), 0.0);
    }

    #[test]
    fn conforming_fields_have_equal_norms(a in prop::collection::vec(-2.0f64..2.0, 9)) {
        let space = Space::continuous(refined(DomainShape::SlitSquare, 1));
        let f = field(&space, &a);
        let nitsche = discrete_norm(&f, Method::Nitsche, 10.0).unwrap();
        let dg = discrete_norm(&embed_dg(&f).unwrap(), Method::Dg, 10.0).unwrap();
        prop_assert!((nitsche - dg).abs() <= 1e-12 * nitsche.max(1.0));
    }

    #[test]
    fn prolongation_preserves_the_function(
        a in prop::collection::vec(-2.0f64..2.0, 11),
        bits in prop::collection::vec(any::<bool>(), 1..9),
        dg in any::<bool>(),
        red in any::<bool>(),
    ) {
        let kind = if dg { Method::Dg } else { Method::Nitsche }.space_kind();
        let coarse_mesh = refined(DomainShape::LShape, 1);
        let fine_mesh = if red {
            coarse_mesh.red_refine()
        } else {
            coarse_mesh.nvb_refine(&marks(&coarse_mesh, &bits)).unwrap()
        };
        let coarse = field(&Space::new(kind, coarse_mesh), &a);
        let fine = prolong(&coarse, &Space::new(kind, Arc::new(fine_mesh))).unwrap();
        let (s0, s1) = (energy_seminorm(&coarse), energy_seminorm(&fine));
        prop_assert!((s0 - s1).abs() <= 1e-13 * s0.max(1.0));
        let m = if dg { Method::Dg } else { Method::Nitsche };
        let (d0, d1) = (discrete_norm(&coarse, m, 10.0).unwrap(), discrete_norm(&fine, m, 10.0).unwrap());
        prop_assert!(d1 >= d0 - 1e-12, "finer penalty weights only grow");
    }

    #[test]
    fn b_symmetries(
        x in prop::collection::vec(-1.0f64..1.0, 3),
        y in prop::collection::vec(-1.0f64..1.0, 4),
        z in prop::collection::vec(-1.0f64..1.0, 5),
        w in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let space = Space::continuous(refined(DomainShape::UnitSquare, 2));
        let (xi, eta, th, ph) = (field(&space, &x), field(&space, &y), field(&space, &z), field(&space, &w));
        let b = |a: &Field, b: &Field, c: &Field, d: &Field| eval_b(a, b, c, d, 0.5).unwrap();
        let v = b(&xi, &eta, &th, &ph);
        let tol = 1e-12 * v.abs().max(1.0);
        prop_assert!((v - b(&eta, &xi, &ph, &th)).abs() < tol);
        prop_assert!((v - b(&th, &ph, &xi, &eta)).abs() < tol);
        let op = assemble_b_bilinear(&xi, &eta, 0.5).unwrap();
        prop_assert!((op.form(ph.coefficients(), th.coefficients()) - 3.0 * v).abs() < 3.0 * tol);
    }

    #[test]
    fn residual_decouples_componentwise(a in prop::collection::vec(-1.5f64..1.5, 6), dg in any::<bool>()) {
        let method = if dg { Method::Dg } else { Method::Nitsche };
        let space = Space::new(method.space_kind(), refined(DomainShape::LShape, 1));
        let n = space.n_nodes();
        let mut c = field(&space, &a).into_coefficients();
        c[n..].iter_mut().for_each(|v| *v = 0.0);
        let psi = Field::new(space, c).unwrap();
        let g = |p: [f64; 2]| [p[0] - p[1] * p[1], 0.0];
        let f = |p: [f64; 2]| [p[0].sin(), 0.0];
        let r = residual(&psi, &MethodConfig::new(method, 0.3), &g, Some(&f)).unwrap();
        prop_assert!(r[n..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nitsche_residual_is_restricted_dg_residual(a in prop::collection::vec(-1.5f64..1.5, 8)) {
        let space = Space::continuous(refined(DomainShape::SlitSquare, 1));
        let psi = field(&space, &a);
        let p = slit_problem(0.6).unwrap();
        let rn = residual(&psi, &MethodConfig::new(Method::Nitsche, 0.6), p.boundary(), p.source()).unwrap();
        let rd = residual(&embed_dg(&psi).unwrap(), &MethodConfig::new(Method::Dg, 0.6), p.boundary(), p.source()).unwrap();
        let restricted = restrict_dg_vector(&space, &rd).unwrap();
        let scale = rn.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in rn.iter().zip(&restricted) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn operators_are_finite_with_symmetric_patterns(a in prop::collection::vec(-1.5f64..1.5, 5), dg in any::<bool>()) {
        let method = if dg { Method::Dg } else { Method::Nitsche };
        let space = Space::new(method.space_kind(), refined(DomainShape::SlitSquare, 0));
        let cfg = MethodConfig::new(method, 0.7);
        let psi = field(&space, &a);
        for op in [assemble_a(&space, &cfg).unwrap(), assemble_c(&space, &cfg).unwrap(), jacobian(&psi, &cfg).unwrap()] {
            prop_assert!(op.is_finite());
            prop_assert!(op.has_symmetric_pattern());
            prop_assert!(op.max_asymmetry() < 1e-10);
        }
    }

    #[test]
    fn field_csv_round_trip(a in prop::collection::vec(-1e3f64..1e3, 1..20)) {
        let space = Space::dg(refined(DomainShape::UnitSquare, 1));
        let f = field(&space, &a);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = Field::read_csv(space, buf.as_slice()).unwrap();
        prop_assert_eq!(back.coefficients(), f.coefficients());
    }

    #[test]
    fn estimator_parts_add_up(a in prop::collection::vec(-1.5f64..1.5, 7), dg in any::<bool>()) {
        let method = if dg { Method::Dg } else { Method::Nitsche };
        let space = Space::new(method.space_kind(), refined(DomainShape::LShape, 1));
        let p = lshape_problem(0.4).unwrap();
        let b = estimate_for(&field(&space, &a), &MethodConfig::new(method, 0.4), p.boundary(), p.source()).unwrap();
        prop_assert!((b.total - b.recomputed_total()).abs() <= 1e-12 * b.total);
        let all = b.theta_t.iter().chain(&b.theta_ei).chain(&b.theta_ebd);
        prop_assert!(all.into_iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn manufactured_sources_are_consistent(
        r in 0.1f64..0.9,
        angle in 0.0f64..1.0,
        slit in any::<bool>(),
    ) {
        let (p, theta) = if slit {
            (slit_problem(0.6).unwrap(), 0.02 + angle * (2.0 * std::f64::consts::PI - 0.04))
        } else {
            (lshape_problem(0.4).unwrap(), 0.02 + angle * (1.5 * std::f64::consts::PI - 0.04))
        };
        let x = [r * theta.cos(), r * theta.sin()];
        prop_assume!(x[0].abs() + x[1].abs() < 0.98 && x[0].abs().max(x[1].abs()) < 0.98);
        check_source(&p, x)?;
    }

    #[test]
    fn device_boundary_is_continuous(t in 0.0f64..0.5, eps in 0.01f64..0.16) {
        let p = device_problem(eps).unwrap();
        let d = 3.0 * eps;
        let g = |x: [f64; 2]| (p.g)(x);
        // every corner is approached from both of its sides
        for (a, b) in [([t, 0.0], [0.0, t]), ([1.0 - t, 0.0], [1.0, t]), ([t, 1.0], [0.0, 1.0 - t]), ([1.0 - t, 1.0], [1.0, 1.0 - t])] {
            let (ga, gb) = (g(a), g(b));
            prop_assert!(ga[0].abs() <= t / d + 1e-15 && gb[0].abs() <= t / d + 1e-15);
            prop_assert!(ga[1] == 0.0 && gb[1] == 0.0);
        }
        prop_assert!((trapezoid(t, d) - trapezoid(1.0 - t, d)).abs() < 1e-12);
    }
}

fn check_source(p: &ProblemSpec, x: [f64; 2]) -> Result<(), TestCaseError> {
    let h = 1e-4;
    let u = |q: [f64; 2]| (p.exact.as_ref().unwrap().value)(q);
    let c = u(x);
    let e = p.epsilon;
    let f = (p.f.as_ref().unwrap())(x);
    for k in 0..2 {
        let lap = (u([x[0] + h, x[1]])[k] + u([x[0] - h, x[1]])[k] + u([x[0], x[1] + h])[k] + u([x[0], x[1] - h])[k]
            - 4.0 * c[k])
            / (h * h);
        let expect = -lap - 2.0 / (e * e) * (1.0 - c[0] * c[0] - c[1] * c[1]) * c[k];
        prop_assert!((f[k] - expect).abs() < 1e-4 * expect.abs().max(1.0), "{} vs {} at {:?}", f[k], expect, x);
    }
    Ok(())
}

#[test]
fn boundary_data_is_the_exact_trace() {
    for p in [lshape_problem(0.4).unwrap(), slit_problem(0.6).unwrap()] {
        let mesh = build_initial_mesh(p.shape);
        let exact = &p.exact.as_ref().unwrap().value;
        for seg in mesh.segments() {
            for k in 0..=20 {
                let s = k as f64 / 20.0;
                let x = [seg.start[0] + s * (seg.end[0] - seg.start[0]), seg.start[1] + s * (seg.end[1] - seg.start[1])];
                let (a, b) = ((p.g)(x), exact(x));
                assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn slit_faces_carry_distinct_gradient_traces() {
    let p = slit_problem(0.6).unwrap();
    let grad = &p.exact.as_ref().unwrap().gradient;
    let (upper, lower) = (grad([0.4, 1e-14]), grad([0.4, -1e-14]));
    assert!((p.g)([0.4, 1e-14])[0].abs() < 1e-6 && (p.g)([0.4, -1e-14])[0].abs() < 1e-6);
    assert!((upper[0][1] + lower[0][1]).abs() < 1e-6 && upper[0][1].abs() > 0.5);
}

#[test]
fn estimator_decreases_under_uniform_refinement() {
    use glfem::adapt::solve_level;
    use glfem::solver::{InitialGuess, NewtonConfig};
    for p in [lshape_problem(0.4).unwrap(), slit_problem(0.6).unwrap()] {
        let cfg = MethodConfig::new(Method::Nitsche, p.epsilon);
        let mut last = f64::INFINITY;
        for level in 0..4 {
            let space = Space::continuous(refined(p.shape, level));
            let (psi, _) = solve_level(&p, &space, &cfg, &NewtonConfig::default(), None, InitialGuess::Laplace).unwrap();
            let est = estimate_for(&psi, &cfg, p.boundary(), p.source()).unwrap().total;
            assert!(est < last, "{:?} level {level}: {est} >= {last}", p.kind);
            last = est;
        }
    }
}

#[test]
fn manufactured_residual_shrinks() {
    use glfem::fespace::interpolate;
    let p = lshape_problem(0.4).unwrap();
    for method in [Method::Nitsche, Method::Dg] {
        let cfg = MethodConfig::new(method, 0.4);
        let mut last = f64::INFINITY;
        for level in 1..4 {
            let space = Space::new(method.space_kind(), refined(DomainShape::LShape, level));
            let psi = interpolate(&space, &*p.exact.as_ref().unwrap().value).unwrap();
            let r = residual(&psi, &cfg, p.boundary(), p.source()).unwrap();
            let proxy = r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (r.len() as f64).sqrt();
            assert!(proxy < last, "{method:?} level {level}");
            last = proxy;
        }
    }
}

#[test]
fn newton_is_deterministic() {
    use glfem::adapt::solve_level;
    use glfem::solver::{InitialGuess, NewtonConfig};
    let p = lshape_problem(0.4).unwrap();
    let cfg = MethodConfig::new(Method::Dg, 0.4);
    let space = Space::dg(refined(DomainShape::LShape, 2));
    let run = || solve_level(&p, &space, &cfg, &NewtonConfig::default(), None, InitialGuess::Laplace).unwrap();
    let (a, ra) = run();
    let (b, rb) = run();
    assert_eq!(ra, rb);
    assert_eq!(a.coefficients(), b.coefficients());
    let r = residual(&a, &cfg, p.boundary(), p.source()).unwrap();
    assert!(r.iter().all(|v| v.abs() <= 10.0 * 1e-8));
}
