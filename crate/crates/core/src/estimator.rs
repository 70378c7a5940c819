//! Residual a posteriori estimators.
//!
//! Per triangle `theta_T^2 = h_T^2 |f - 2 eps^-2 (|Psi|^2 - 1) Psi|^2_{0,T}`;
//! per interior edge `h_E |[grad Psi nu]|^2_{0,E}` (plus `|[Psi]|^2_{0,E} / h_E`
//! for dG); per boundary edge `|Psi - g|^2_{0,E} / h_E`. The Laplacian of a P1
//! function vanishes on every triangle.

use std::io::Write;

use crate::error::{Error, Result};
use crate::fespace::{Field, Piecewise, SpaceKind};
use crate::forms::MethodConfig;
use crate::mesh::Point;
use crate::quadrature::{EdgeRule, TriangleRule};

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorBreakdown {
    pub mesh_id: u64,
    /// Indexed by triangle id.
    pub theta_t: Vec<f64>,
    /// Indexed by edge id; zero on boundary edges.
    pub theta_ei: Vec<f64>,
    /// Indexed by edge id; zero on interior edges.
    pub theta_ebd: Vec<f64>,
    pub total: f64,
}

impl EstimatorBreakdown {
    pub fn recomputed_total(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        (sq(&self.theta_t) + sq(&self.theta_ei) + sq(&self.theta_ebd)).sqrt()
    }

    /// Rows `entity_kind,id,value` with kinds `triangle`, `interior_edge`
    /// and `boundary_edge`.
    pub fn write_csv<W: Write>(&self, mut w: W, boundary: &[bool]) -> std::io::Result<()> {
        writeln!(w, "entity_kind,id,value")?;
        for (t, v) in self.theta_t.iter().enumerate() {
            writeln!(w, "triangle,{t},{v:e}")?;
        }
        for (e, &b) in boundary.iter().enumerate() {
            if b {
                writeln!(w, "boundary_edge,{e},{:e}", self.theta_ebd[e])?;
            } else {
                writeln!(w, "interior_edge,{e},{:e}", self.theta_ei[e])?;
            }
        }
        Ok(())
    }
}

pub fn estimate_nitsche(
    psi: &Field,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<EstimatorBreakdown> {
    if psi.space().kind() != SpaceKind::ContinuousP1 {
        return Err(Error::SpaceMismatch("the Nitsche estimator needs a continuous field".into()));
    }
    estimate(psi, cfg, g, f, false)
}

pub fn estimate_dg(
    psi: &Field,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<EstimatorBreakdown> {
    if psi.space().kind() != SpaceKind::DgP1 {
        return Err(Error::SpaceMismatch("the dG estimator needs a dG field".into()));
    }
    estimate(psi, cfg, g, f, true)
}

/// Dispatches on the field's space.
pub fn estimate_for(
    psi: &Field,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<EstimatorBreakdown> {
    match psi.space().kind() {
        SpaceKind::ContinuousP1 => estimate_nitsche(psi, cfg, g, f),
        SpaceKind::DgP1 => estimate_dg(psi, cfg, g, f),
    }
}

fn estimate(
    psi: &Field,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
    value_jumps: bool,
) -> Result<EstimatorBreakdown> {
    cfg.validate()?;
    let mesh = psi.mesh();
    let k = 2.0 / (cfg.epsilon * cfg.epsilon);
    let rule = TriangleRule::degree6();
    let mut theta_t = Vec::with_capacity(mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        let mut s = 0.0;
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let p = psi.value(t, &geom, *bary);
            let m = k * (p[0] * p[0] + p[1] * p[1] - 1.0);
            let mut r = [-m * p[0], -m * p[1]];
            if let Some(f) = f {
                let x = geom.point(*bary);
                let fv = f(x);
                if !(fv[0].is_finite() && fv[1].is_finite()) {
                    return Err(Error::DataEvaluation {
                        location: format!("source at ({}, {})", x[0], x[1]),
                    });
                }
                r[0] += fv[0];
                r[1] += fv[1];
            }
            s += w * (r[0] * r[0] + r[1] * r[1]);
        }
        let h = geom.diameter();
        theta_t.push((h * h * s * geom.area).sqrt());
    }

    let edge_rule = EdgeRule::gauss3();
    let mut theta_ei = vec![0.0; mesh.n_edges()];
    let mut theta_ebd = vec![0.0; mesh.n_edges()];
    for (e, edge) in mesh.edges().iter().enumerate() {
        let eg = mesh.edge_geometry(e);
        let h = eg.length;
        let gl = mesh.geometry(edge.left);
        let trace_left: Vec<[f64; 2]> = edge_rule
            .points
            .iter()
            .map(|&s| psi.value(edge.left, &gl, gl.barycentric(eg.point(s))))
            .collect();
        match edge.right {
            Some(r) => {
                let gr = mesh.geometry(r);
                let dl = psi.gradient(edge.left, &gl, [0.0; 3]);
                let dr = psi.gradient(r, &gr, [0.0; 3]);
                let n = eg.normal;
                let jump = [
                    (dl[0][0] - dr[0][0]) * n[0] + (dl[0][1] - dr[0][1]) * n[1],
                    (dl[1][0] - dr[1][0]) * n[0] + (dl[1][1] - dr[1][1]) * n[1],
                ];
                let mut sq = h * h * (jump[0] * jump[0] + jump[1] * jump[1]);
                if value_jumps {
                    let mut s = 0.0;
                    for (q, &t) in edge_rule.points.iter().enumerate() {
                        let other = psi.value(r, &gr, gr.barycentric(eg.point(t)));
                        let d = [trace_left[q][0] - other[0], trace_left[q][1] - other[1]];
                        s += edge_rule.weights[q] * (d[0] * d[0] + d[1] * d[1]);
                    }
                    sq += s;
                }
                theta_ei[e] = sq.sqrt();
            }
            None => {
                let mut s = 0.0;
                for (q, &t) in edge_rule.points.iter().enumerate() {
                    let x = eg.point(t);
                    let gv = g(x);
                    if !(gv[0].is_finite() && gv[1].is_finite()) {
                        return Err(Error::DataEvaluation {
                            location: format!("boundary data at ({}, {})", x[0], x[1]),
                        });
                    }
                    let d = [trace_left[q][0] - gv[0], trace_left[q][1] - gv[1]];
                    s += edge_rule.weights[q] * (d[0] * d[0] + d[1] * d[1]);
                }
                // (1/h) * h * mean of |Psi - g|^2
                theta_ebd[e] = s.sqrt();
            }
        }
    }
    let mut out = EstimatorBreakdown {
        mesh_id: mesh.id(),
        theta_t,
        theta_ei,
        theta_ebd,
        total: 0.0,
    };
    out.total = out.recomputed_total();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fespace::{embed_dg, interpolate, Space};
    use crate::forms::Method;
    use crate::mesh::{build_initial_mesh, DomainShape, Mesh};

    fn square(levels: usize) -> Arc<Mesh> {
        let mut m = build_initial_mesh(DomainShape::UnitSquare);
        for _ in 0..levels {
            m = m.red_refine();
        }
        Arc::new(m)
    }

    #[test]
    fn unit_constant_has_zero_estimate() {
        let space = Space::continuous(square(2));
        let psi = interpolate(&space, &|_| [0.6, -0.8]).unwrap();
        let b = estimate_nitsche(&psi, &MethodConfig::new(Method::Nitsche, 0.3), &|_| [0.6, -0.8], None).unwrap();
        assert!(b.total < 1e-13);
        let zero = Field::zeros(space);
        let b = estimate_nitsche(&zero, &MethodConfig::new(Method::Nitsche, 1.0), &|_| [0.0, 0.0], None).unwrap();
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn conforming_field_same_in_both_estimators() {
        let space = Space::continuous(square(2));
        let psi = interpolate(&space, &|p| [p[0] * p[1], (2.0 * p[0]).cos()]).unwrap();
        let g = |p: Point| [p[0], p[1]];
        let a = estimate_nitsche(&psi, &MethodConfig::new(Method::Nitsche, 0.5), &g, None).unwrap();
        let b = estimate_dg(&embed_dg(&psi).unwrap(), &MethodConfig::new(Method::Dg, 0.5), &g, None).unwrap();
        assert!((a.total - b.total).abs() < 1e-12 * a.total);
        assert!((a.total - a.recomputed_total()).abs() < 1e-12 * a.total);
    }

    #[test]
    fn single_jump_closed_form() {
        // Two triangles (0,0),(1,0),(1,1) and (0,0),(1,1),(0,1); the dG field
        // is the hat of corner (1,1) in the first triangle only.
        let mesh = Mesh::from_triangles(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![],
        )
        .unwrap();
        let space = Space::dg(Arc::new(mesh));
        let mut c = vec![0.0; space.dof_count()];
        c[2] = 1.0;
        let psi = Field::new(space.clone(), c).unwrap();
        let b = estimate_dg(&psi, &MethodConfig::new(Method::Dg, 1.0), &|_| [0.0, 0.0], None).unwrap();
        let mesh = space.mesh();
        let diag = (0..mesh.n_edges()).find(|&e| !mesh.edges()[e].is_boundary()).unwrap();
        // hat gradient is (0, 1); normal of the diagonal is +-(1,-1)/sqrt2
        // gradient jump: h (1/2); value jump: int_0^1 s^2 ds * sqrt2 / sqrt2
        let h = 2f64.sqrt();
        let expect = h * h * 0.5 + 1.0 / 3.0;
        assert!((b.theta_ei[diag].powi(2) - expect).abs() < 1e-14, "{}", b.theta_ei[diag]);
    }

    #[test]
    fn csv_has_every_entity() {
        let space = Space::continuous(square(1));
        let psi = interpolate(&space, &|p| [p[0], 0.0]).unwrap();
        let b = estimate_nitsche(&psi, &MethodConfig::new(Method::Nitsche, 1.0), &|_| [0.0, 0.0], None).unwrap();
        let boundary: Vec<bool> = space.mesh().edges().iter().map(|e| e.is_boundary()).collect();
        let mut buf = Vec::new();
        b.write_csv(&mut buf, &boundary).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + space.mesh().n_triangles() + space.mesh().n_edges());
        assert!(text.starts_with("entity_kind,id,value\ntriangle,0,"));
    }

    #[test]
    fn wrong_space_rejected() {
        let psi = Field::zeros(Space::dg(square(0)));
        let cfg = MethodConfig::new(Method::Nitsche, 1.0);
        assert!(matches!(estimate_nitsche(&psi, &cfg, &|_| [0.0, 0.0], None), Err(Error::SpaceMismatch(_))));
    }
}
