//! Continuous and discontinuous P1 spaces for the two-component order
//! parameter `(u, v)`, fields over them, and the mesh-dependent norms.
//!
//! Degrees of freedom are stored component-blocked: scalar node `n` of
//! component `c` is dof `c * n_nodes + n`. Nodes are vertices for the
//! continuous space and triangle corners (`3 t + i`) for the dG space.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::Method;
use crate::mesh::{Mesh, Point, TriangleGeometry, VertexOrigin};
use crate::quadrature::{EdgeRule, TriangleRule};

pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
/// `grad[c]` is the gradient of component `c`.
pub type GradientFn = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution {
    pub value: VectorFn,
    pub gradient: GradientFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ExactSolution { .. }")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    ContinuousP1,
    DgP1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofEntity {
    Vertex(usize),
    Corner { triangle: usize, local: usize },
}

#[derive(Clone, Debug)]
pub struct Space {
    kind: SpaceKind,
    mesh: Arc<Mesh>,
}

impl Space {
    pub fn new(kind: SpaceKind, mesh: Arc<Mesh>) -> Self {
        Self { kind, mesh }
    }

    pub fn continuous(mesh: Arc<Mesh>) -> Self {
        Self::new(SpaceKind::ContinuousP1, mesh)
    }

    pub fn dg(mesh: Arc<Mesh>) -> Self {
        Self::new(SpaceKind::DgP1, mesh)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Scalar nodes per component.
    pub fn n_nodes(&self) -> usize {
        match self.kind {
            SpaceKind::ContinuousP1 => self.mesh.n_vertices(),
            SpaceKind::DgP1 => 3 * self.mesh.n_triangles(),
        }
    }

    pub fn dof_count(&self) -> usize {
        2 * self.n_nodes()
    }

    /// Scalar node indices of triangle `t`'s three corners.
    #[inline]
    pub fn local_nodes(&self, t: usize) -> [usize; 3] {
        match self.kind {
            SpaceKind::ContinuousP1 => self.mesh.triangles()[t],
            SpaceKind::DgP1 => [3 * t, 3 * t + 1, 3 * t + 2],
        }
    }

    pub fn dof(&self, component: usize, node: usize) -> usize {
        component * self.n_nodes() + node
    }

    pub fn dof_entity(&self, dof: usize) -> Result<(usize, DofEntity)> {
        let n = self.n_nodes();
        if dof >= 2 * n {
            return Err(Error::IdOutOfRange {
                kind: "dof",
                id: dof,
                count: 2 * n,
            });
        }
        let (c, node) = (dof / n, dof % n);
        let entity = match self.kind {
            SpaceKind::ContinuousP1 => DofEntity::Vertex(node),
            SpaceKind::DgP1 => DofEntity::Corner {
                triangle: node / 3,
                local: node % 3,
            },
        };
        Ok((c, entity))
    }

    pub fn same_as(&self, other: &Space) -> bool {
        self.kind == other.kind && self.mesh.id() == other.mesh.id()
    }

    fn node_point(&self, node: usize) -> Point {
        match self.kind {
            SpaceKind::ContinuousP1 => self.mesh.vertices()[node],
            SpaceKind::DgP1 => self.mesh.vertices()[self.mesh.triangles()[node / 3][node % 3]],
        }
    }
}

/// A piecewise smooth 2-vector function that can be sampled per triangle.
pub trait Piecewise {
    fn mesh(&self) -> &Mesh;
    fn value(&self, t: usize, geom: &TriangleGeometry, bary: [f64; 3]) -> [f64; 2];
    fn gradient(&self, t: usize, geom: &TriangleGeometry, bary: [f64; 3]) -> [[f64; 2]; 2];
}

#[derive(Clone, Debug)]
pub struct Field {
    space: Space,
    coeffs: Vec<f64>,
}

impl Field {
    pub fn new(space: Space, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dof_count() {
            return Err(Error::SpaceMismatch(format!(
                "{} coefficients for a space with {} dofs",
                coeffs.len(),
                space.dof_count()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::DataEvaluation {
                location: format!("coefficient {i}"),
            });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zeros(space: Space) -> Self {
        let n = space.dof_count();
        Self {
            space,
            coeffs: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coeffs
    }

    pub(crate) fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// `values[c][i]`: component `c` at local corner `i` of triangle `t`.
    #[inline]
    pub fn local_values(&self, t: usize) -> [[f64; 3]; 2] {
        let nodes = self.space.local_nodes(t);
        let n = self.space.n_nodes();
        [nodes.map(|k| self.coeffs[k]), nodes.map(|k| self.coeffs[n + k])]
    }

    /// `self - other`, both on the same space.
    pub fn minus(&self, other: &Field) -> Result<Field> {
        if !self.space.same_as(&other.space) {
            return Err(Error::SpaceMismatch("fields live on different spaces".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Field {
            space: self.space.clone(),
            coeffs,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "dof_index,value")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{i},{c}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(space: Space, r: R) -> Result<Field> {
        let mut coeffs = vec![f64::NAN; space.dof_count()];
        let mut seen = vec![false; coeffs.len()];
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if lineno == 0 {
                if line.trim() != "dof_index,value" {
                    return Err(Error::Parse(format!("unexpected header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (i, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected two columns", lineno + 1)))?;
            let i: usize = i.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad index", lineno + 1)))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad value", lineno + 1)))?;
            if i >= coeffs.len() {
                return Err(Error::IdOutOfRange {
                    kind: "dof",
                    id: i,
                    count: coeffs.len(),
                });
            }
            coeffs[i] = v;
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!("dof {i} missing")));
        }
        Field::new(space, coeffs)
    }
}

impl Piecewise for Field {
    fn mesh(&self) -> &Mesh {
        self.space.mesh()
    }

    #[inline]
    fn value(&self, t: usize, _geom: &TriangleGeometry, bary: [f64; 3]) -> [f64; 2] {
        let v = self.local_values(t);
        [
            v[0][0] * bary[0] + v[0][1] * bary[1] + v[0][2] * bary[2],
            v[1][0] * bary[0] + v[1][1] * bary[1] + v[1][2] * bary[2],
        ]
    }

    #[inline]
    fn gradient(&self, t: usize, geom: &TriangleGeometry, _bary: [f64; 3]) -> [[f64; 2]; 2] {
        let v = self.local_values(t);
        let g = &geom.grad_bary;
        let grad = |c: usize| {
            [
                v[c][0] * g[0][0] + v[c][1] * g[1][0] + v[c][2] * g[2][0],
                v[c][0] * g[0][1] + v[c][1] * g[1][1] + v[c][2] * g[2][1],
            ]
        };
        [grad(0), grad(1)]
    }
}

/// `exact - field`, sampled at physical points.
pub struct Difference<'a> {
    pub exact: &'a ExactSolution,
    pub field: &'a Field,
}

impl Piecewise for Difference<'_> {
    fn mesh(&self) -> &Mesh {
        self.field.mesh()
    }

    fn value(&self, t: usize, geom: &TriangleGeometry, bary: [f64; 3]) -> [f64; 2] {
        let e = (self.exact.value)(geom.point(bary));
        let h = self.field.value(t, geom, bary);
        [e[0] - h[0], e[1] - h[1]]
    }

    fn gradient(&self, t: usize, geom: &TriangleGeometry, bary: [f64; 3]) -> [[f64; 2]; 2] {
        let e = (self.exact.gradient)(geom.point(bary));
        let h = self.field.gradient(t, geom, bary);
        [
            [e[0][0] - h[0][0], e[0][1] - h[0][1]],
            [e[1][0] - h[1][0], e[1][1] - h[1][1]],
        ]
    }
}

/// Nodal interpolation of `f` (vertex values, or per-triangle corner values
/// for the dG space).
pub fn interpolate(space: &Space, f: &dyn Fn(Point) -> [f64; 2]) -> Result<Field> {
    let n = space.n_nodes();
    let mut coeffs = vec![0.0; 2 * n];
    for node in 0..n {
        let p = space.node_point(node);
        let val = f(p);
        if !(val[0].is_finite() && val[1].is_finite()) {
            return Err(Error::DataEvaluation {
                location: format!("node {node} at ({}, {})", p[0], p[1]),
            });
        }
        coeffs[node] = val[0];
        coeffs[n + node] = val[1];
    }
    Field::new(space.clone(), coeffs)
}

/// Exact transfer of a P1 field to a mesh refined from its own.
pub fn prolong(coarse: &Field, fine_space: &Space) -> Result<Field> {
    let coarse_mesh = coarse.space().mesh();
    let fine_mesh = fine_space.mesh();
    let lineage = fine_mesh
        .lineage()
        .filter(|l| l.parent_id == coarse_mesh.id())
        .ok_or_else(|| Error::Nesting("fine mesh was not refined from the field's mesh".into()))?;
    if coarse.space().kind() != fine_space.kind() {
        return Err(Error::SpaceMismatch("prolongation between different space kinds".into()));
    }
    let nc = coarse.space().n_nodes();
    let nf = fine_space.n_nodes();
    let src = coarse.coefficients();
    let mut coeffs = vec![0.0; 2 * nf];
    match fine_space.kind() {
        SpaceKind::ContinuousP1 => {
            for (v, origin) in lineage.vertex_origin.iter().enumerate() {
                for c in 0..2 {
                    coeffs[c * nf + v] = match *origin {
                        VertexOrigin::Inherited(i) => src[c * nc + i],
                        VertexOrigin::Midpoint(a, b) => 0.5 * (src[c * nc + a] + src[c * nc + b]),
                    };
                }
            }
        }
        SpaceKind::DgP1 => {
            for t in 0..fine_mesh.n_triangles() {
                let p = lineage.parent_triangle[t];
                let pg = coarse_mesh.geometry(p);
                let vals = coarse.local_values(p);
                for (i, &v) in fine_mesh.triangles()[t].iter().enumerate() {
                    let bary = pg.barycentric(fine_mesh.vertices()[v]);
                    for c in 0..2 {
                        coeffs[c * nf + 3 * t + i] =
                            vals[c][0] * bary[0] + vals[c][1] * bary[1] + vals[c][2] * bary[2];
                    }
                }
            }
        }
    }
    Field::new(fine_space.clone(), coeffs)
}

/// The same piecewise-linear function viewed in the dG space on its mesh.
pub fn embed_dg(field: &Field) -> Result<Field> {
    if field.space().kind() != SpaceKind::ContinuousP1 {
        return Err(Error::SpaceMismatch("embedding expects a continuous field".into()));
    }
    let space = Space::dg(field.space().mesh_arc().clone());
    let n = space.n_nodes();
    let mut coeffs = vec![0.0; 2 * n];
    for t in 0..space.mesh().n_triangles() {
        let vals = field.local_values(t);
        for i in 0..3 {
            coeffs[3 * t + i] = vals[0][i];
            coeffs[n + 3 * t + i] = vals[1][i];
        }
    }
    Field::new(space, coeffs)
}

/// Transpose of [`embed_dg`]: sums dG corner entries onto their vertices.
pub fn restrict_dg_vector(cg: &Space, dg_values: &[f64]) -> Result<Vec<f64>> {
    let nt = cg.mesh().n_triangles();
    if cg.kind() != SpaceKind::ContinuousP1 || dg_values.len() != 6 * nt {
        return Err(Error::SpaceMismatch("restriction needs a continuous space and a matching dG vector".into()));
    }
    let nv = cg.n_nodes();
    let nd = 3 * nt;
    let mut out = vec![0.0; 2 * nv];
    for (t, tri) in cg.mesh().triangles().iter().enumerate() {
        for (i, &v) in tri.iter().enumerate() {
            out[v] += dg_values[3 * t + i];
            out[nv + v] += dg_values[nd + 3 * t + i];
        }
    }
    Ok(out)
}

fn gradient_sq_sum(f: &impl Piecewise, rule: &TriangleRule) -> f64 {
    let mesh = f.mesh();
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        let mut s = 0.0;
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let g = f.gradient(t, &geom, *bary);
            s += w * (g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1]);
        }
        total += s * geom.area;
    }
    total
}

/// Broken H^1 seminorm `(sum_T |grad f|^2_{0,T})^{1/2}`.
pub fn energy_seminorm(f: &impl Piecewise) -> f64 {
    gradient_sq_sum(f, &TriangleRule::degree6()).sqrt()
}

/// The mesh-dependent energy norm: broken H^1 seminorm plus
/// `sigma / h_E * |[f]|^2_{0,E}` over boundary edges (Nitsche) or all edges
/// (dG).
pub fn discrete_norm(f: &impl Piecewise, method: Method, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Config(format!("penalty sigma must be positive, got {sigma}")));
    }
    let mesh = f.mesh();
    let edge_rule = EdgeRule::gauss3();
    let mut total = gradient_sq_sum(f, &TriangleRule::degree6());
    for e in 0..mesh.n_edges() {
        let edge = &mesh.edges()[e];
        if method == Method::Nitsche && !edge.is_boundary() {
            continue;
        }
        let eg = mesh.edge_geometry(e);
        let gl = mesh.geometry(edge.left);
        let gr = edge.right.map(|r| (r, mesh.geometry(r)));
        let mut s = 0.0;
        for (&q, &w) in edge_rule.points.iter().zip(&edge_rule.weights) {
            let x = eg.point(q);
            let mut jump = f.value(edge.left, &gl, gl.barycentric(x));
            if let Some((r, g)) = &gr {
                let other = f.value(*r, g, g.barycentric(x));
                jump[0] -= other[0];
                jump[1] -= other[1];
            }
            s += w * (jump[0] * jump[0] + jump[1] * jump[1]);
        }
        total += sigma / eg.length * s * eg.length;
    }
    Ok(total.sqrt())
}

pub fn l2_norm(f: &impl Piecewise) -> f64 {
    let mesh = f.mesh();
    let rule = TriangleRule::degree6();
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        let mut s = 0.0;
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let v = f.value(t, &geom, *bary);
            s += w * (v[0] * v[0] + v[1] * v[1]);
        }
        total += s * geom.area;
    }
    total.sqrt()
}

/// `int_Omega |grad Psi|^2 + eps^-2 (|Psi|^2 - 1)^2 dx`, exact for P1 fields.
pub fn energy_functional(field: &Field, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let mesh = field.mesh();
    let rule = TriangleRule::degree4();
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        let g = field.gradient(t, &geom, [0.0; 3]);
        let grad_sq = g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1];
        let mut potential = 0.0;
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let v = field.value(t, &geom, *bary);
            let m = v[0] * v[0] + v[1] * v[1] - 1.0;
            potential += w * m * m;
        }
        total += geom.area * (grad_sq + inv_eps2 * potential);
    }
    Ok(total)
}
