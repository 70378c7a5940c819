//! Conforming triangulations with edge topology, uniform red refinement and
//! newest-vertex bisection (NVB) with closure.
//!
//! Triangles store their vertices counterclockwise. Local edge `i` of a
//! triangle is the edge opposite its local vertex `i`; the refinement edge is
//! stored as such a local index. An edge's `left` triangle is the one with the
//! smaller id and its vertex pair follows that triangle's counterclockwise
//! order, so the edge normal computed by [`Mesh::edge_geometry`] points out of
//! `left` (and into `right`, for interior edges).
//!
//! Meshes are immutable; refinement returns a new mesh that remembers its
//! parent through a [`Lineage`], which is what prolongation between levels
//! relies on.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

/// Coarse benchmark geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainShape {
    /// `(0,1)^2`.
    UnitSquare,
    /// `(-1,1)^2 \ [0,1]x[-1,0]`, re-entrant corner at the origin.
    LShape,
    /// `{|x|+|y| < 1} \ ([0,1]x{0})`, slit tip at the origin.
    SlitSquare,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    pub segment: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// A straight piece of the domain boundary, oriented so the domain lies on
/// its left.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySegment {
    pub label: String,
    pub start: Point,
    pub end: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexOrigin {
    Inherited(usize),
    Midpoint(usize, usize),
}

/// How a refined mesh relates to the mesh it was produced from.
#[derive(Clone, Debug)]
pub struct Lineage {
    pub parent_id: u64,
    pub vertex_origin: Vec<VertexOrigin>,
    pub parent_triangle: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    /// Gradients of the three barycentric coordinate functions.
    pub grad_bary: [[f64; 2]; 3],
}

impl TriangleGeometry {
    pub fn point(&self, bary: [f64; 3]) -> Point {
        let v = &self.vertices;
        [
            bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
            bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
        ]
    }

    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let v0 = self.vertices[0];
        let dx = p[0] - v0[0];
        let dy = p[1] - v0[1];
        let l1 = self.grad_bary[1][0] * dx + self.grad_bary[1][1] * dy;
        let l2 = self.grad_bary[2][0] * dx + self.grad_bary[2][1] * dy;
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        dist(v[0], v[1]).max(dist(v[1], v[2])).max(dist(v[2], v[0]))
    }

    pub fn centroid(&self) -> Point {
        self.point([1.0 / 3.0; 3])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EdgeGeometry {
    pub a: Point,
    pub b: Point,
    pub length: f64,
    /// Unit normal pointing out of the edge's left triangle.
    pub normal: [f64; 2],
}

impl EdgeGeometry {
    pub fn point(&self, s: f64) -> Point {
        [
            self.a[0] + s * (self.b[0] - self.a[0]),
            self.a[1] + s * (self.b[1] - self.a[1]),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    id: u64,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    refinement_edge: Vec<u8>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    segments: Vec<BoundarySegment>,
    lineage: Option<Lineage>,
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn local_edge(tri: &[usize; 3], i: usize) -> (usize, usize) {
    (tri[(i + 1) % 3], tri[(i + 2) % 3])
}

fn longest_edge_index(vertices: &[Point], tri: &[usize; 3]) -> u8 {
    let mut best = 0usize;
    let mut best_len = -1.0;
    for i in 0..3 {
        let (a, b) = local_edge(tri, i);
        let len = dist(vertices[a], vertices[b]);
        let better = len > best_len * (1.0 + 1e-12)
            || ((len - best_len).abs() <= 1e-12 * len && tri[i] < tri[best]);
        if better {
            best = i;
            best_len = len;
        }
    }
    best as u8
}

impl Mesh {
    /// Builds a mesh from raw counterclockwise triangles. Refinement edges are
    /// initialised to the longest edge, ties broken by the smallest opposite
    /// vertex id; boundary edges are matched against `segments` geometrically.
    pub fn from_triangles(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        segments: Vec<BoundarySegment>,
    ) -> Result<Self> {
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::IdOutOfRange {
                        kind: "vertex",
                        id: v,
                        count: vertices.len(),
                    });
                }
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area <= 0.0 {
                return Err(Error::Config(format!(
                    "triangle {t} is not counterclockwise (signed area {area:e})"
                )));
            }
        }
        let refinement_edge = triangles
            .iter()
            .map(|tri| longest_edge_index(&vertices, tri))
            .collect();
        let mut mesh = Self::assemble(vertices, triangles, refinement_edge, segments, None, &HashMap::new())?;
        mesh.classify_boundary();
        Ok(mesh)
    }

    fn assemble(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        refinement_edge: Vec<u8>,
        segments: Vec<BoundarySegment>,
        lineage: Option<Lineage>,
        boundary_segment: &HashMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 3 / 2 + 8);
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for (i, slot) in te.iter_mut().enumerate() {
                let (a, b) = local_edge(tri, i);
                let k = key(a, b);
                match index.get(&k) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.right.is_some() {
                            return Err(Error::Config(format!(
                                "edge ({a},{b}) is shared by more than two triangles"
                            )));
                        }
                        edge.right = Some(t);
                        *slot = e;
                    }
                    None => {
                        let e = edges.len();
                        edges.push(Edge {
                            vertices: [a, b],
                            left: t,
                            right: None,
                            segment: None,
                        });
                        index.insert(k, e);
                        *slot = e;
                    }
                }
            }
            triangle_edges.push(te);
        }
        for edge in edges.iter_mut().filter(|e| e.right.is_none()) {
            edge.segment = boundary_segment
                .get(&key(edge.vertices[0], edge.vertices[1]))
                .copied();
        }
        Ok(Self {
            id: NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed),
            vertices,
            triangles,
            refinement_edge,
            edges,
            triangle_edges,
            segments,
            lineage,
        })
    }

    fn classify_boundary(&mut self) {
        let scale = self
            .vertices
            .iter()
            .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
            .max(1.0);
        let tol = 1e-12 * scale;
        for e in 0..self.edges.len() {
            if !self.edges[e].is_boundary() {
                continue;
            }
            let [a, b] = self.edges[e].vertices;
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            let c = self.geometry(self.edges[e].left).centroid();
            self.edges[e].segment = self.segments.iter().position(|s| {
                let on = |p: Point| {
                    let len = dist(s.start, s.end);
                    let cross = signed_area(s.start, s.end, p) * 2.0 / len;
                    let along = ((p[0] - s.start[0]) * (s.end[0] - s.start[0])
                        + (p[1] - s.start[1]) * (s.end[1] - s.start[1]))
                        / len;
                    cross.abs() <= tol && along >= -tol && along <= len + tol
                };
                on(pa) && on(pb) && signed_area(s.start, s.end, c) > 0.0
            });
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    /// Edge ids of each triangle's local edges (edge `i` is opposite vertex `i`).
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }
    pub fn refinement_edges(&self) -> &[u8] {
        &self.refinement_edge
    }
    pub fn segments(&self) -> &[BoundarySegment] {
        &self.segments
    }
    pub fn lineage(&self) -> Option<&Lineage> {
        self.lineage.as_ref()
    }
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        let tri = self.triangles[t];
        let v = [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ];
        let area = signed_area(v[0], v[1], v[2]);
        let inv = 1.0 / (2.0 * area);
        let mut grad_bary = [[0.0; 2]; 3];
        for (i, g) in grad_bary.iter_mut().enumerate() {
            let a = v[(i + 1) % 3];
            let b = v[(i + 2) % 3];
            *g = [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv];
        }
        TriangleGeometry {
            vertices: v,
            area,
            grad_bary,
        }
    }

    pub fn edge_geometry(&self, e: usize) -> EdgeGeometry {
        let [a, b] = self.edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let length = dist(pa, pb);
        EdgeGeometry {
            a: pa,
            b: pb,
            length,
            normal: [(pb[1] - pa[1]) / length, (pa[0] - pb[0]) / length],
        }
    }

    pub fn edge_length(&self, e: usize) -> Result<f64> {
        if e >= self.edges.len() {
            return Err(Error::IdOutOfRange {
                kind: "edge",
                id: e,
                count: self.edges.len(),
            });
        }
        Ok(self.edge_geometry(e).length)
    }

    pub fn triangle_diameter(&self, t: usize) -> Result<f64> {
        if t >= self.triangles.len() {
            return Err(Error::IdOutOfRange {
                kind: "triangle",
                id: t,
                count: self.triangles.len(),
            });
        }
        Ok(self.geometry(t).diameter())
    }

    /// Mesh size `h = max_T diam(T)`.
    pub fn max_diameter(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| self.geometry(t).diameter())
            .fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.geometry(t).area).sum()
    }

    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.n_triangles() {
            let v = self.geometry(t).vertices;
            for i in 0..3 {
                let p = v[i];
                let a = v[(i + 1) % 3];
                let b = v[(i + 2) % 3];
                let u = [a[0] - p[0], a[1] - p[1]];
                let w = [b[0] - p[0], b[1] - p[1]];
                let cos = (u[0] * w[0] + u[1] * w[1]) / (dist(a, p) * dist(b, p));
                min = min.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        min
    }

    /// Vertices that lie on at least one boundary edge.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.n_vertices()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            on[e.vertices[0]] = true;
            on[e.vertices[1]] = true;
        }
        on
    }

    /// Checks edge/triangle incidence, positive orientation, and the absence
    /// of hanging nodes. Meshes with labelled boundary segments must have every
    /// boundary edge on its segment; unlabelled meshes are checked
    /// geometrically for vertices inside boundary edges.
    pub fn check_conformity(&self) -> Result<()> {
        for (t, tri) in self.triangles.iter().enumerate() {
            let g = self.geometry(t);
            if g.area <= 0.0 {
                return Err(Error::Consistency(format!("triangle {t} has non-positive area")));
            }
            if usize::from(self.refinement_edge[t]) > 2 {
                return Err(Error::Consistency(format!("triangle {t} has an invalid refinement edge")));
            }
            for i in 0..3 {
                let e = &self.edges[self.triangle_edges[t][i]];
                let (a, b) = local_edge(tri, i);
                let ok = (e.left == t && e.vertices == [a, b]) || (e.right == Some(t) && e.vertices == [b, a]);
                if !ok {
                    return Err(Error::Consistency(format!("triangle {t} edge {i} is inconsistent")));
                }
            }
        }
        if self.segments.is_empty() {
            let bnd: Vec<usize> = (0..self.n_edges()).filter(|&e| self.edges[e].is_boundary()).collect();
            for &e in &bnd {
                let g = self.edge_geometry(e);
                for (v, &p) in self.vertices.iter().enumerate() {
                    if self.edges[e].vertices.contains(&v) {
                        continue;
                    }
                    let cross = signed_area(g.a, g.b, p) * 2.0 / g.length;
                    let s = ((p[0] - g.a[0]) * (g.b[0] - g.a[0]) + (p[1] - g.a[1]) * (g.b[1] - g.a[1]))
                        / (g.length * g.length);
                    if cross.abs() < 1e-12 * g.length && s > 1e-12 && s < 1.0 - 1e-12 {
                        return Err(Error::Consistency(format!("hanging vertex {v} on edge {e}")));
                    }
                }
            }
        } else {
            for (e, edge) in self.edges.iter().enumerate().filter(|(_, e)| e.is_boundary()) {
                let Some(s) = edge.segment else {
                    return Err(Error::Consistency(format!(
                        "boundary edge {e} ({:?}) does not lie on the domain boundary (hanging node)",
                        edge.vertices
                    )));
                };
                let seg = &self.segments[s];
                let len = dist(seg.start, seg.end);
                for &v in &edge.vertices {
                    let cross = signed_area(seg.start, seg.end, self.vertices[v]) * 2.0 / len;
                    if cross.abs() > 1e-10 * len {
                        return Err(Error::Consistency(format!("edge {e} left its segment {s}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces every triangle by four similar children through its edge
    /// midpoints. Old vertex ids are kept; the midpoint of edge `e` gets id
    /// `n_vertices + e`. Children keep the parent's refinement-edge index.
    pub fn red_refine(&self) -> Mesh {
        let nv = self.n_vertices();
        let mut vertices = self.vertices.clone();
        let mut origin: Vec<VertexOrigin> = (0..nv).map(VertexOrigin::Inherited).collect();
        for e in &self.edges {
            let [a, b] = e.vertices;
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            origin.push(VertexOrigin::Midpoint(a, b));
        }
        let mut triangles = Vec::with_capacity(4 * self.n_triangles());
        let mut refinement_edge = Vec::with_capacity(4 * self.n_triangles());
        let mut parent = Vec::with_capacity(4 * self.n_triangles());
        for (t, tri) in self.triangles.iter().enumerate() {
            let m = self.triangle_edges[t].map(|e| nv + e);
            let [v0, v1, v2] = *tri;
            for child in [[v0, m[2], m[1]], [m[2], v1, m[0]], [m[1], m[0], v2], [m[0], m[1], m[2]]] {
                triangles.push(child);
                refinement_edge.push(self.refinement_edge[t]);
                parent.push(t);
            }
        }
        let mut seg = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if let Some(s) = edge.segment {
                let [a, b] = edge.vertices;
                seg.insert(key(a, nv + e), s);
                seg.insert(key(nv + e, b), s);
            }
        }
        let lineage = Lineage {
            parent_id: self.id,
            vertex_origin: origin,
            parent_triangle: parent,
        };
        Self::assemble(vertices, triangles, refinement_edge, self.segments.clone(), Some(lineage), &seg)
            .expect("red refinement of a conforming mesh is conforming")
    }

    /// Newest-vertex bisection: every marked triangle is bisected through its
    /// refinement edge, then further edges are bisected until the mesh is
    /// conforming. Children's refinement edges lie opposite the new vertex.
    pub fn nvb_refine(&self, marked: &[usize]) -> Result<Mesh> {
        Ok(self.nvb_refine_with_parents(marked)?.0)
    }

    /// As [`Mesh::nvb_refine`], also returning the parent triangle of each
    /// child.
    pub fn nvb_refine_with_parents(&self, marked: &[usize]) -> Result<(Mesh, Vec<usize>)> {
        let nt = self.n_triangles();
        let mut edge_marked = vec![false; self.n_edges()];
        let mut work = Vec::new();
        for &t in marked {
            if t >= nt {
                return Err(Error::IdOutOfRange {
                    kind: "triangle",
                    id: t,
                    count: nt,
                });
            }
            let e = self.triangle_edges[t][usize::from(self.refinement_edge[t])];
            if !edge_marked[e] {
                edge_marked[e] = true;
                work.push(e);
            }
        }
        // Closure: a triangle with any marked edge must have its refinement
        // edge marked too.
        while let Some(e) = work.pop() {
            let edge = &self.edges[e];
            for t in std::iter::once(edge.left).chain(edge.right) {
                let r = self.triangle_edges[t][usize::from(self.refinement_edge[t])];
                if !edge_marked[r] {
                    edge_marked[r] = true;
                    work.push(r);
                }
            }
        }

        let nv = self.n_vertices();
        let mut vertices = self.vertices.clone();
        let mut origin: Vec<VertexOrigin> = (0..nv).map(VertexOrigin::Inherited).collect();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut seg = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let [a, b] = edge.vertices;
            if edge_marked[e] {
                let m = vertices.len();
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                origin.push(VertexOrigin::Midpoint(a, b));
                midpoint.insert(key(a, b), m);
                if let Some(s) = edge.segment {
                    seg.insert(key(a, m), s);
                    seg.insert(key(m, b), s);
                }
            } else if let Some(s) = edge.segment {
                seg.insert(key(a, b), s);
            }
        }

        let mut triangles = Vec::with_capacity(nt + 2 * marked.len());
        let mut refinement_edge = Vec::with_capacity(nt + 2 * marked.len());
        let mut parent = Vec::with_capacity(nt + 2 * marked.len());
        let mut stack = Vec::new();
        for t in 0..nt {
            stack.push((self.triangles[t], usize::from(self.refinement_edge[t])));
            while let Some((tri, r)) = stack.pop() {
                let a = tri[r];
                let b = tri[(r + 1) % 3];
                let c = tri[(r + 2) % 3];
                match midpoint.get(&key(b, c)) {
                    Some(&m) => {
                        // Pushed in reverse so the (a, b, m) child is emitted first.
                        stack.push(([a, m, c], 1));
                        stack.push(([a, b, m], 2));
                    }
                    None => {
                        triangles.push(tri);
                        refinement_edge.push(r as u8);
                        parent.push(t);
                    }
                }
            }
        }
        let lineage = Lineage {
            parent_id: self.id,
            vertex_origin: origin,
            parent_triangle: parent.clone(),
        };
        let mesh = Self::assemble(vertices, triangles, refinement_edge, self.segments.clone(), Some(lineage), &seg)?;
        Ok((mesh, parent))
    }

    /// Plain-text dump: a `vertices N triangles M edges K` header, then one
    /// `v x y` line per vertex, one `t a b c r` line per triangle (`r` is the
    /// refinement-edge index) and one `e a b left right segment` line per edge
    /// (`-1` for absent neighbours or segments).
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "vertices {} triangles {} edges {}",
            self.n_vertices(),
            self.n_triangles(),
            self.n_edges()
        );
        for p in &self.vertices {
            let _ = writeln!(s, "v {} {}", p[0], p[1]);
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let _ = writeln!(s, "t {} {} {} {}", tri[0], tri[1], tri[2], self.refinement_edge[t]);
        }
        for e in &self.edges {
            let right = e.right.map_or(-1, |r| r as i64);
            let segment = e.segment.map_or(-1, |r| r as i64);
            let _ = writeln!(s, "e {} {} {} {} {}", e.vertices[0], e.vertices[1], e.left, right, segment);
        }
        s
    }
}

fn segments(corners: &[(Point, &str)]) -> Vec<BoundarySegment> {
    (0..corners.len())
        .map(|i| BoundarySegment {
            label: corners[i].1.to_string(),
            start: corners[i].0,
            end: corners[(i + 1) % corners.len()].0,
        })
        .collect()
}

/// Hand-built coarse mesh of a benchmark shape.
///
/// * unit square: 2 triangles split along the (0,0)-(1,1) diagonal;
/// * L-shape: 6 triangles, each unit square split by a diagonal through the
///   re-entrant corner;
/// * slit: the four quadrant triangles of the diamond, red-refined once, with
///   every vertex on the slit except the tip duplicated so the two slit faces
///   are separate boundary segments.
pub fn build_initial_mesh(shape: DomainShape) -> Mesh {
    let mesh = match shape {
        DomainShape::UnitSquare => Mesh::from_triangles(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            segments(&[
                ([0.0, 0.0], "bottom"),
                ([1.0, 0.0], "right"),
                ([1.0, 1.0], "top"),
                ([0.0, 1.0], "left"),
            ]),
        ),
        DomainShape::LShape => Mesh::from_triangles(
            vec![
                [-1.0, -1.0],
                [0.0, -1.0],
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 1.0],
                [0.0, 1.0],
                [-1.0, 1.0],
                [-1.0, 0.0],
            ],
            vec![[0, 1, 2], [0, 2, 7], [2, 3, 4], [2, 4, 5], [7, 2, 6], [2, 5, 6]],
            segments(&[
                ([0.0, 0.0], "corner-right"),
                ([1.0, 0.0], "right"),
                ([1.0, 1.0], "top"),
                ([-1.0, 1.0], "left"),
                ([-1.0, -1.0], "bottom"),
                ([0.0, -1.0], "corner-down"),
            ]),
        ),
        DomainShape::SlitSquare => {
            let base = Mesh::from_triangles(
                vec![
                    [0.0, 0.0],
                    [1.0, 0.0],
                    [0.0, 1.0],
                    [-1.0, 0.0],
                    [0.0, -1.0],
                    [1.0, 0.0],
                ],
                vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5]],
                vec![
                    BoundarySegment {
                        label: "north-east".into(),
                        start: [1.0, 0.0],
                        end: [0.0, 1.0],
                    },
                    BoundarySegment {
                        label: "north-west".into(),
                        start: [0.0, 1.0],
                        end: [-1.0, 0.0],
                    },
                    BoundarySegment {
                        label: "south-west".into(),
                        start: [-1.0, 0.0],
                        end: [0.0, -1.0],
                    },
                    BoundarySegment {
                        label: "south-east".into(),
                        start: [0.0, -1.0],
                        end: [1.0, 0.0],
                    },
                    BoundarySegment {
                        label: "slit-lower".into(),
                        start: [1.0, 0.0],
                        end: [0.0, 0.0],
                    },
                    BoundarySegment {
                        label: "slit-upper".into(),
                        start: [0.0, 0.0],
                        end: [1.0, 0.0],
                    },
                ],
            )
            .expect("slit base mesh");
            let mut refined = base.red_refine();
            refined.lineage = None;
            Ok(refined)
        }
    };
    mesh.expect("benchmark meshes are valid")
}
