//! Conforming triangulations of the unit square and the unit disk.
//!
//! Vertices carry the P1 degrees of freedom; cells carry the design density.
//! Boundary edges are stored counter-clockwise, so the outward normal of
//! edge `(a, b)` is the tangent `b − a` rotated by −90°.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Which construction produced the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `n × n` grid on `[0,1]²`.
    Square { n: usize },
    /// Concentric-ring disk with `rings` rings (ring `j` holds `6j` vertices).
    Disk { level: usize, rings: usize },
    /// Loaded from a file; no construction metadata.
    Loaded,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    cell_areas: Vec<f64>,
    edge_lengths: Vec<f64>,
    /// Gradients of the three barycentric basis functions per cell.
    grads: Vec<[Point; 3]>,
    domain: Domain,
}

impl Mesh {
    /// Assemble a mesh from raw arrays, computing areas and basis gradients.
    /// Rejects degenerate or clockwise cells and out-of-range indices.
    pub fn from_parts(vertices: Vec<Point>, cells: Vec<[usize; 3]>, boundary_edges: Vec<[usize; 2]>, domain: Domain) -> Result<Self> {
        let nv = vertices.len();
        let mut cell_areas = Vec::with_capacity(cells.len());
        let mut grads = Vec::with_capacity(cells.len());
        for (c, tri) in cells.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::Mesh(format!("cell {c} references a missing vertex")));
            }
            let [a, b, d] = tri.map(|i| vertices[i]);
            let det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
            if !(det > 0.0) {
                return Err(Error::Mesh(format!("cell {c} is degenerate or clockwise (2*area = {det})")));
            }
            cell_areas.push(0.5 * det);
            let inv = 1.0 / det;
            grads.push([
                [(b[1] - d[1]) * inv, (d[0] - b[0]) * inv],
                [(d[1] - a[1]) * inv, (a[0] - d[0]) * inv],
                [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv],
            ]);
        }
        let mut edge_lengths = Vec::with_capacity(boundary_edges.len());
        for (e, &[i, j]) in boundary_edges.iter().enumerate() {
            if i >= nv || j >= nv {
                return Err(Error::Mesh(format!("boundary edge {e} references a missing vertex")));
            }
            edge_lengths.push(dist(vertices[i], vertices[j]));
        }
        Ok(Mesh { vertices, cells, boundary_edges, cell_areas, edge_lengths, grads, domain })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }
    pub fn cell_areas(&self) -> &[f64] {
        &self.cell_areas
    }
    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }
    pub fn basis_gradients(&self, cell: usize) -> &[Point; 3] {
        &self.grads[cell]
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_areas.iter().sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }

    pub fn barycenter(&self, cell: usize) -> Point {
        let [a, b, c] = self.cells[cell].map(|i| self.vertices[i]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Largest edge length over all cells.
    pub fn mesh_size(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(i, j)| dist(self.vertices[i], self.vertices[j]))
            .fold(0.0, f64::max)
    }

    pub fn max_cell_area(&self) -> f64 {
        self.cell_areas.iter().copied().fold(0.0, f64::max)
    }

    /// Center used for outward-normal sanity checks.
    pub fn center(&self) -> Point {
        match self.domain {
            Domain::Square { .. } => [0.5, 0.5],
            Domain::Disk { .. } => [0.0, 0.0],
            Domain::Loaded => {
                let n = self.vertices.len() as f64;
                let sx: f64 = self.vertices.iter().map(|v| v[0]).sum();
                let sy: f64 = self.vertices.iter().map(|v| v[1]).sum();
                [sx / n, sy / n]
            }
        }
    }

    /// Outward unit normal of boundary edge `e`.
    pub fn outward_normal(&self, e: usize) -> Point {
        let [i, j] = self.boundary_edges[e];
        let (a, b) = (self.vertices[i], self.vertices[j]);
        let l = self.edge_lengths[e];
        [(b[1] - a[1]) / l, -(b[0] - a[0]) / l]
    }

    /// Flags for vertices on the boundary.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for &[i, j] in &self.boundary_edges {
            mask[i] = true;
            mask[j] = true;
        }
        mask
    }

    /// Undirected edges with the cells incident to each.
    pub fn edge_incidence(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (c, t) in self.cells.iter().enumerate() {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                map.entry((i.min(j), i.max(j))).or_default().push(c);
            }
        }
        map
    }

    /// Sorted neighbour lists including the vertex itself.
    pub fn vertex_neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = (0..self.vertices.len()).map(|i| vec![i]).collect();
        for t in &self.cells {
            for &a in t {
                for &b in t {
                    adj[a].push(b);
                }
            }
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }

    /// Cells whose barycenter satisfies `predicate`, in ascending index order.
    pub fn locate_cells_by_predicate<P: Fn(Point) -> bool>(&self, predicate: P) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| predicate(self.barycenter(c))).collect()
    }

    /// Evaluate the P1 interpolant of `u` at `p`. Points outside the
    /// triangulation are clamped to the nearest boundary edge.
    pub fn interpolate(&self, u: &[f64], p: Point) -> f64 {
        for (c, t) in self.cells.iter().enumerate() {
            let bary = self.barycentric(c, p);
            if bary.iter().all(|&l| l >= -1e-12) {
                return (0..3).map(|k| bary[k] * u[t[k]]).sum();
            }
        }
        let mut best = (f64::INFINITY, 0.0);
        for &[i, j] in &self.boundary_edges {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let s = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
            let q = [a[0] + s * d[0], a[1] + s * d[1]];
            let dd = dist(p, q);
            if dd < best.0 {
                best = (dd, (1.0 - s) * u[i] + s * u[j]);
            }
        }
        best.1
    }

    fn barycentric(&self, cell: usize, p: Point) -> [f64; 3] {
        let t = self.cells[cell];
        let a = self.vertices[t[0]];
        let g = &self.grads[cell];
        let l1 = g[1][0] * (p[0] - a[0]) + g[1][1] * (p[1] - a[1]);
        let l2 = g[2][0] * (p[0] - a[0]) + g[2][1] * (p[1] - a[1]);
        [1.0 - l1 - l2, l1, l2]
    }

    /// Plain-text dump: header `nv nc nb`, then vertex, cell and boundary lines.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.cells.len(), self.boundary_edges.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {}", v[0], v[1]);
        }
        for c in &self.cells {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {}", e[0], e[1]);
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn load<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
            let (no, line) = lines.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") })?;
            let line = line?;
            Ok((no, line.split_whitespace().map(str::to_owned).collect()))
        };
        fn nums<T: std::str::FromStr>(no: usize, toks: &[String], k: usize) -> Result<Vec<T>> {
            if toks.len() != k {
                return Err(Error::Parse { line: no, msg: format!("expected {k} fields, found {}", toks.len()) });
            }
            toks.iter()
                .map(|t| t.parse::<T>().map_err(|_| Error::Parse { line: no, msg: format!("bad number `{t}`") }))
                .collect()
        }
        let (no, head) = next("header")?;
        let h: Vec<usize> = nums(no, &head, 3)?;
        let mut vertices = Vec::with_capacity(h[0]);
        for _ in 0..h[0] {
            let (no, t) = next("vertex")?;
            let v: Vec<f64> = nums(no, &t, 2)?;
            vertices.push([v[0], v[1]]);
        }
        let mut cells = Vec::with_capacity(h[1]);
        for _ in 0..h[1] {
            let (no, t) = next("cell")?;
            let c: Vec<usize> = nums(no, &t, 3)?;
            cells.push([c[0], c[1], c[2]]);
        }
        let mut edges = Vec::with_capacity(h[2]);
        for _ in 0..h[2] {
            let (no, t) = next("boundary edge")?;
            let e: Vec<usize> = nums(no, &t, 2)?;
            edges.push([e[0], e[1]]);
        }
        Mesh::from_parts(vertices, cells, edges, Domain::Loaded)
    }
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `n × n` grid on the unit square, each square split along its diagonal.
pub fn build_unit_square(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("square mesh needs n >= 1".into()));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // exact endpoints so the boundary length is exactly 4
            let x = if i == n { 1.0 } else { i as f64 * h };
            let y = if j == n { 1.0 } else { j as f64 * h };
            vertices.push([x, y]);
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            cells.push([a, b, c]);
            cells.push([a, c, d]);
        }
    }
    let mut edges = Vec::with_capacity(4 * n);
    (0..n).for_each(|i| edges.push([idx(i, 0), idx(i + 1, 0)]));
    (0..n).for_each(|j| edges.push([idx(n, j), idx(n, j + 1)]));
    (0..n).rev().for_each(|i| edges.push([idx(i + 1, n), idx(i, n)]));
    (0..n).rev().for_each(|j| edges.push([idx(0, j + 1), idx(0, j)]));
    Mesh::from_parts(vertices, cells, edges, Domain::Square { n })
}

/// Number of rings used at disk refinement level `level`.
pub fn disk_rings(level: usize) -> usize {
    1usize << (level - 1)
}

/// Concentric-ring disk: level `k` has `2^(k-1)` rings at radii `j/m`, ring
/// `j` holding `6j` equally spaced vertices. Level 1 is the hexagonal fan.
pub fn build_unit_disk(level: usize) -> Result<Mesh> {
    if level == 0 || level > 12 {
        return Err(Error::InvalidArgument(format!("disk level must be in 1..=12, got {level}")));
    }
    let m = disk_rings(level);
    let ring_start = |j: usize| if j == 0 { 0 } else { 1 + 3 * j * (j - 1) };
    let mut vertices = vec![[0.0, 0.0]];
    for j in 1..=m {
        let r = if j == m { 1.0 } else { j as f64 / m as f64 };
        let count = 6 * j;
        for i in 0..count {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            let (s, c) = theta.sin_cos();
            vertices.push([r * c, r * s]);
        }
    }
    let ring_vertex = |j: usize, i: usize| -> usize {
        if j == 0 {
            0
        } else {
            ring_start(j) + i % (6 * j)
        }
    };
    let mut cells = Vec::with_capacity(6 * m * m);
    for j in 1..=m {
        for s in 0..6 {
            let inner = |k: usize| ring_vertex(j - 1, s * (j - 1) + k);
            let outer = |k: usize| ring_vertex(j, s * j + k);
            for k in 0..j {
                cells.push([inner(k), outer(k), outer(k + 1)]);
                if k + 1 < j {
                    cells.push([inner(k), outer(k + 1), inner(k + 1)]);
                }
            }
        }
    }
    let edges = (0..6 * m).map(|i| [ring_vertex(m, i), ring_vertex(m, i + 1)]).collect();
    Mesh::from_parts(vertices, cells, edges, Domain::Disk { level, rings: m })
}
