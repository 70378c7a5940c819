//! Assembly of the Nitsche and SIPG forms, the cubic term, the residual and
//! the Newton Jacobian.
//!
//! Rows are test functions, columns trial functions. On an edge the
//! triangle with the smaller id is `T+`, the normal points out of `T+`, and
//! jumps are `trace(T+) - trace(T-)`; boundary edges use the single trace.

use std::io::Write;
use std::str::FromStr;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};
use crate::fespace::{Field, Space, SpaceKind};
use crate::mesh::Point;
use crate::quadrature::{EdgeRule, TriangleRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Nitsche,
    Dg,
}

impl Method {
    pub fn space_kind(self) -> SpaceKind {
        match self {
            Method::Nitsche => SpaceKind::ContinuousP1,
            Method::Dg => SpaceKind::DgP1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Nitsche => "nitsche",
            Method::Dg => "dg",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nitsche" => Ok(Method::Nitsche),
            "dg" => Ok(Method::Dg),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MethodConfig {
    pub method: Method,
    pub sigma: f64,
    /// Symmetrisation parameter of the dG form; unused by Nitsche.
    pub lambda: f64,
    pub epsilon: f64,
}

impl MethodConfig {
    pub fn new(method: Method, epsilon: f64) -> Self {
        Self {
            method,
            sigma: 10.0,
            lambda: 1.0,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(-1.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda must lie in [-1, 1], got {}", self.lambda)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    fn check_space(&self, space: &Space) -> Result<()> {
        self.validate()?;
        if space.kind() != self.method.space_kind() {
            return Err(Error::SpaceMismatch(format!(
                "{} forms need a {:?} space, got {:?}",
                self.method.as_str(),
                self.method.space_kind(),
                space.kind()
            )));
        }
        Ok(())
    }

    /// Edge symmetrisation actually used: Nitsche is always symmetric.
    fn effective_lambda(&self) -> f64 {
        match self.method {
            Method::Nitsche => 1.0,
            Method::Dg => self.lambda,
        }
    }
}

/// Square sparse matrix in compressed row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Duplicate entries are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len() / 2);
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len() / 2);
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().expect("nonempty") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// Bilinear form value `y^T M x`.
    pub fn form(&self, y: &[f64], x: &[f64]) -> f64 {
        self.apply(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.n, other.n);
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut vals = Vec::with_capacity(cols.capacity());
        row_ptr.push(0);
        for r in 0..self.n {
            let mut a = self.row(r).peekable();
            let mut b = other.row(r).peekable();
            loop {
                let next = match (a.peek(), b.peek()) {
                    (None, None) => break,
                    (Some(_), None) => a.next().expect("peeked"),
                    (None, Some(_)) => b.next().expect("peeked"),
                    (Some(&(ca, va)), Some(&(cb, vb))) => {
                        if ca < cb {
                            a.next();
                            (ca, va)
                        } else if cb < ca {
                            b.next();
                            (cb, vb)
                        } else {
                            a.next();
                            b.next();
                            (ca, va + vb)
                        }
                    }
                };
                cols.push(next.0);
                vals.push(next.1);
            }
            row_ptr.push(cols.len());
        }
        Self {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn has_symmetric_pattern(&self) -> bool {
        (0..self.n).all(|r| {
            self.row(r).all(|(c, _)| {
                let range = self.row_ptr[c]..self.row_ptr[c + 1];
                self.cols[range].binary_search(&r).is_ok()
            })
        })
    }

    pub fn is_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        out
    }

    /// Coordinate dump: header `rows cols nnz`, then `row col value` lines.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.n, self.n, self.nnz())?;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                writeln!(w, "{r} {c} {v:e}")?;
            }
        }
        Ok(())
    }

    /// Direct sparse LU solve; fails if the factorisation breaks down or the
    /// relative residual exceeds `1e-6`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(rhs.len(), self.n);
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                triplets.push(Triplet::new(r, c, v));
            }
        }
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::SolverFailure {
                reason: format!("cannot build sparse matrix: {e:?}"),
            })?;
        let lu = mat.sp_lu().map_err(|e| Error::SolverFailure {
            reason: format!("LU factorisation failed: {e:?}"),
        })?;
        let b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = faer::linalg::solvers::Solve::solve(&lu, &b);
        let x: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        let ax = self.apply(&x);
        let res = ax.iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = rhs.iter().map(|b| b * b).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let rel = res / scale;
        if !(rel.is_finite() && (rel <= 1e-6 || res <= 1e-13)) {
            return Err(Error::SolverFailure {
                reason: format!("relative residual {rel:e} after direct solve (matrix likely singular)"),
            });
        }
        Ok(x)
    }
}

/// Scalar-node couplings `(test, trial, value)` replicated on both components.
fn push_blockwise(space: &Space, out: &mut Vec<(usize, usize, f64)>, i: usize, j: usize, v: f64) {
    let n = space.n_nodes();
    out.push((i, j, v));
    out.push((n + i, n + j, v));
}

fn stiffness_triplets(space: &Space, out: &mut Vec<(usize, usize, f64)>) {
    let mesh = space.mesh();
    for t in 0..mesh.n_triangles() {
        let g = mesh.geometry(t);
        let nodes = space.local_nodes(t);
        for a in 0..3 {
            for b in 0..3 {
                let k = g.area * (g.grad_bary[a][0] * g.grad_bary[b][0] + g.grad_bary[a][1] * g.grad_bary[b][1]);
                push_blockwise(space, out, nodes[a], nodes[b], k);
            }
        }
    }
}

/// One side of an edge: scalar node, its jump sign, its basis values at the
/// edge quadrature points and its (averaged) normal derivative.
struct TraceBasis {
    node: usize,
    values: [f64; 3],
    dnormal: f64,
}

fn edge_traces(space: &Space, e: usize, rule: &EdgeRule) -> (Vec<TraceBasis>, f64) {
    let mesh = space.mesh();
    let edge = &mesh.edges()[e];
    let eg = mesh.edge_geometry(e);
    let sides: Vec<(usize, f64)> = match edge.right {
        Some(r) => vec![(edge.left, 1.0), (r, -1.0)],
        None => vec![(edge.left, 1.0)],
    };
    let avg = if sides.len() == 2 { 0.5 } else { 1.0 };
    let mut out = Vec::with_capacity(6);
    for (t, sign) in sides {
        let g = mesh.geometry(t);
        let nodes = space.local_nodes(t);
        let bary: Vec<[f64; 3]> = rule.points.iter().map(|&s| g.barycentric(eg.point(s))).collect();
        for a in 0..3 {
            let dn = g.grad_bary[a][0] * eg.normal[0] + g.grad_bary[a][1] * eg.normal[1];
            out.push(TraceBasis {
                node: nodes[a],
                values: [sign * bary[0][a], sign * bary[1][a], sign * bary[2][a]],
                dnormal: avg * dn,
            });
        }
    }
    (out, eg.length)
}

fn edge_triplets(space: &Space, cfg: &MethodConfig, interior: bool, out: &mut Vec<(usize, usize, f64)>) {
    let mesh = space.mesh();
    let rule = EdgeRule::gauss3();
    let lambda = cfg.effective_lambda();
    for e in 0..mesh.n_edges() {
        if !interior && !mesh.edges()[e].is_boundary() {
            continue;
        }
        let (basis, h) = edge_traces(space, e, &rule);
        for test in &basis {
            for trial in &basis {
                // int [trial][test] and int [test] / int [trial] over the edge
                let mut jj = 0.0;
                let mut j_test = 0.0;
                let mut j_trial = 0.0;
                for q in 0..3 {
                    let w = rule.weights[q] * h;
                    jj += w * trial.values[q] * test.values[q];
                    j_test += w * test.values[q];
                    j_trial += w * trial.values[q];
                }
                let v = -trial.dnormal * j_test - lambda * test.dnormal * j_trial + cfg.sigma / h * jj;
                if v != 0.0 {
                    push_blockwise(space, out, test.node, trial.node, v);
                }
            }
        }
    }
}

/// Nitsche form `A_h` on the continuous space.
pub fn assemble_ah(space: &Space, cfg: &MethodConfig) -> Result<SparseOperator> {
    if cfg.method != Method::Nitsche {
        return Err(Error::Config("assemble_ah requires the nitsche method".into()));
    }
    cfg.check_space(space)?;
    let mut trip = Vec::new();
    stiffness_triplets(space, &mut trip);
    edge_triplets(space, cfg, false, &mut trip);
    Ok(SparseOperator::from_triplets(space.dof_count(), trip))
}

/// Interior penalty form `A_dG` on the discontinuous space.
pub fn assemble_adg(space: &Space, cfg: &MethodConfig) -> Result<SparseOperator> {
    if cfg.method != Method::Dg {
        return Err(Error::Config("assemble_adg requires the dg method".into()));
    }
    cfg.check_space(space)?;
    let mut trip = Vec::new();
    stiffness_triplets(space, &mut trip);
    edge_triplets(space, cfg, true, &mut trip);
    Ok(SparseOperator::from_triplets(space.dof_count(), trip))
}

pub fn assemble_a(space: &Space, cfg: &MethodConfig) -> Result<SparseOperator> {
    match cfg.method {
        Method::Nitsche => assemble_ah(space, cfg),
        Method::Dg => assemble_adg(space, cfg),
    }
}

/// Volume-only part of the stiffness (no edge terms).
pub fn assemble_stiffness(space: &Space) -> SparseOperator {
    let mut trip = Vec::new();
    stiffness_triplets(space, &mut trip);
    SparseOperator::from_triplets(space.dof_count(), trip)
}

/// `C(theta, phi) = -2 eps^-2 int theta . phi`.
pub fn assemble_c(space: &Space, cfg: &MethodConfig) -> Result<SparseOperator> {
    cfg.validate()?;
    let s = -2.0 / (cfg.epsilon * cfg.epsilon);
    let mesh = space.mesh();
    let mut trip = Vec::with_capacity(18 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let area = mesh.geometry(t).area;
        let nodes = space.local_nodes(t);
        for a in 0..3 {
            for b in 0..3 {
                let m = if a == b { area / 6.0 } else { area / 12.0 };
                push_blockwise(space, &mut trip, nodes[a], nodes[b], s * m);
            }
        }
    }
    Ok(SparseOperator::from_triplets(space.dof_count(), trip))
}

fn same_space(fields: &[&Field]) -> Result<()> {
    let first = fields[0].space();
    if fields.iter().all(|f| f.space().same_as(first)) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch("fields live on different spaces".into()))
    }
}

#[inline]
fn values_at(local: &[[f64; 3]; 2], bary: &[f64; 3]) -> [f64; 2] {
    [
        local[0][0] * bary[0] + local[0][1] * bary[1] + local[0][2] * bary[2],
        local[1][0] * bary[0] + local[1][1] * bary[1] + local[1][2] * bary[2],
    ]
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `B(xi, eta, theta, phi) = 2/(3 eps^2) int (xi.eta)(theta.phi) + 2 (xi.theta)(eta.phi)`.
pub fn eval_b(xi: &Field, eta: &Field, theta: &Field, phi: &Field, epsilon: f64) -> Result<f64> {
    same_space(&[xi, eta, theta, phi])?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let mesh = xi.space().mesh();
    let rule = TriangleRule::degree4();
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let area = mesh.geometry(t).area;
        let (lx, le, lt, lp) = (xi.local_values(t), eta.local_values(t), theta.local_values(t), phi.local_values(t));
        let mut s = 0.0;
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let (x, e, th, p) = (values_at(&lx, bary), values_at(&le, bary), values_at(&lt, bary), values_at(&lp, bary));
            s += w * (dot(x, e) * dot(th, p) + 2.0 * dot(x, th) * dot(e, p));
        }
        total += area * s;
    }
    Ok(2.0 / (3.0 * epsilon * epsilon) * total)
}

/// Operator of `(theta, phi) -> 3 B(xi, eta, theta, phi)`.
pub fn assemble_b_bilinear(xi: &Field, eta: &Field, epsilon: f64) -> Result<SparseOperator> {
    same_space(&[xi, eta])?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let space = xi.space();
    let n = space.n_nodes();
    let mesh = space.mesh();
    let rule = TriangleRule::degree4();
    let scale = 2.0 / (epsilon * epsilon);
    let mut trip = Vec::with_capacity(36 * mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let area = mesh.geometry(t).area;
        let nodes = space.local_nodes(t);
        let (lx, le) = (xi.local_values(t), eta.local_values(t));
        // m[c][d][a][b] = int lambda_a lambda_b ((xi.eta) delta_cd + 2 xi_d eta_c)
        let mut m = [[[[0.0f64; 3]; 3]; 2]; 2];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let (x, e) = (values_at(&lx, bary), values_at(&le, bary));
            let xe = dot(x, e);
            for c in 0..2 {
                for d in 0..2 {
                    let k = w * (if c == d { xe } else { 0.0 } + 2.0 * x[d] * e[c]);
                    for a in 0..3 {
                        for b in 0..3 {
                            m[c][d][a][b] += k * bary[a] * bary[b];
                        }
                    }
                }
            }
        }
        for c in 0..2 {
            for d in 0..2 {
                for a in 0..3 {
                    for b in 0..3 {
                        trip.push((c * n + nodes[a], d * n + nodes[b], scale * area * m[c][d][a][b]));
                    }
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(space.dof_count(), trip))
}

/// Vector of `B(psi, psi, psi, phi_i) = 2 eps^-2 int |psi|^2 psi . phi_i`.
pub fn cubic_vector(psi: &Field, epsilon: f64) -> Vec<f64> {
    let space = psi.space();
    let n = space.n_nodes();
    let mesh = space.mesh();
    let rule = TriangleRule::degree4();
    let scale = 2.0 / (epsilon * epsilon);
    let mut out = vec![0.0; space.dof_count()];
    for t in 0..mesh.n_triangles() {
        let area = mesh.geometry(t).area;
        let nodes = space.local_nodes(t);
        let local = psi.local_values(t);
        let mut acc = [[0.0f64; 3]; 2];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let p = values_at(&local, bary);
            let m = dot(p, p);
            for c in 0..2 {
                for a in 0..3 {
                    acc[c][a] += w * m * p[c] * bary[a];
                }
            }
        }
        for c in 0..2 {
            for a in 0..3 {
                out[c * n + nodes[a]] += scale * area * acc[c][a];
            }
        }
    }
    out
}

fn check_value(v: [f64; 2], what: &str, x: Point) -> Result<[f64; 2]> {
    if v[0].is_finite() && v[1].is_finite() {
        Ok(v)
    } else {
        Err(Error::DataEvaluation {
            location: format!("{what} at ({}, {})", x[0], x[1]),
        })
    }
}

/// Right-hand side: volume source plus the boundary consistency and penalty
/// terms carrying `g`. The dG consistency term is scaled by `lambda`.
pub fn assemble_load(
    space: &Space,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<Vec<f64>> {
    cfg.check_space(space)?;
    let n = space.n_nodes();
    let mesh = space.mesh();
    let mut out = vec![0.0; space.dof_count()];
    if let Some(f) = f {
        let rule = TriangleRule::degree6();
        for t in 0..mesh.n_triangles() {
            let geom = mesh.geometry(t);
            let nodes = space.local_nodes(t);
            for (bary, w) in rule.points.iter().zip(&rule.weights) {
                let x = geom.point(*bary);
                let fv = check_value(f(x), "source", x)?;
                for c in 0..2 {
                    for a in 0..3 {
                        out[c * n + nodes[a]] += geom.area * w * fv[c] * bary[a];
                    }
                }
            }
        }
    }
    let rule = EdgeRule::gauss3();
    let lambda = cfg.effective_lambda();
    for e in 0..mesh.n_edges() {
        if !mesh.edges()[e].is_boundary() {
            continue;
        }
        let eg = mesh.edge_geometry(e);
        let mut gq = [[0.0; 2]; 3];
        for (q, &s) in rule.points.iter().enumerate() {
            let x = eg.point(s);
            gq[q] = check_value(g(x), "boundary data", x)?;
        }
        let (basis, h) = edge_traces(space, e, &rule);
        for b in &basis {
            for c in 0..2 {
                let mut int_g = 0.0;
                let mut int_g_phi = 0.0;
                for q in 0..3 {
                    let w = rule.weights[q] * h;
                    int_g += w * gq[q][c];
                    int_g_phi += w * gq[q][c] * b.values[q];
                }
                out[c * n + b.node] += -lambda * b.dnormal * int_g + cfg.sigma / h * int_g_phi;
            }
        }
    }
    Ok(out)
}

/// Discrete problem with the solution-independent operators cached.
#[derive(Clone, Debug)]
pub struct NonlinearSystem {
    space: Space,
    cfg: MethodConfig,
    a: SparseOperator,
    linear: SparseOperator,
    load: Vec<f64>,
}

impl NonlinearSystem {
    pub fn new(
        space: Space,
        cfg: MethodConfig,
        g: &dyn Fn(Point) -> [f64; 2],
        f: Option<&dyn Fn(Point) -> [f64; 2]>,
    ) -> Result<Self> {
        let a = assemble_a(&space, &cfg)?;
        let c = assemble_c(&space, &cfg)?;
        let linear = a.add(&c);
        let load = assemble_load(&space, &cfg, g, f)?;
        Ok(Self {
            space,
            cfg,
            a,
            linear,
            load,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn config(&self) -> &MethodConfig {
        &self.cfg
    }

    pub fn a(&self) -> &SparseOperator {
        &self.a
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    fn check(&self, psi: &Field) -> Result<()> {
        if psi.space().same_as(&self.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("field is not on the system's space".into()))
        }
    }

    /// `N(psi; phi_i) = A(psi, phi_i) + B(psi, psi, psi, phi_i) + C(psi, phi_i) - L(phi_i)`.
    pub fn residual(&self, psi: &Field) -> Result<Vec<f64>> {
        self.check(psi)?;
        let mut r = self.linear.apply(psi.coefficients());
        let cubic = cubic_vector(psi, self.cfg.epsilon);
        for ((ri, ci), li) in r.iter_mut().zip(&cubic).zip(&self.load) {
            *ri += ci - li;
        }
        Ok(r)
    }

    /// `A + 3 B(psi, psi, ., .) + C`.
    pub fn jacobian(&self, psi: &Field) -> Result<SparseOperator> {
        self.check(psi)?;
        Ok(self.linear.add(&assemble_b_bilinear(psi, psi, self.cfg.epsilon)?))
    }

    /// Right-hand side of the fixed-point form: `2 B(psi, psi, psi, .) + L`.
    pub fn picard_rhs(&self, psi: &Field) -> Result<Vec<f64>> {
        self.check(psi)?;
        let cubic = cubic_vector(psi, self.cfg.epsilon);
        Ok(cubic.iter().zip(&self.load).map(|(c, l)| 2.0 * c + l).collect())
    }
}

pub fn residual(
    psi: &Field,
    cfg: &MethodConfig,
    g: &dyn Fn(Point) -> [f64; 2],
    f: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<Vec<f64>> {
    NonlinearSystem::new(psi.space().clone(), *cfg, g, f)?.residual(psi)
}

pub fn jacobian(psi: &Field, cfg: &MethodConfig) -> Result<SparseOperator> {
    cfg.check_space(psi.space())?;
    let a = assemble_a(psi.space(), cfg)?;
    let c = assemble_c(psi.space(), cfg)?;
    Ok(a.add(&c).add(&assemble_b_bilinear(psi, psi, cfg.epsilon)?))
}
