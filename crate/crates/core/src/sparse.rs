//! Compressed-row symmetric matrices on the mesh vertex graph and a
//! Jacobi-preconditioned conjugate gradient solver.

use crate::mesh::Mesh;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Sparsity pattern of P1 matrices on `mesh`, reusable across assemblies.
#[derive(Debug, Clone)]
pub struct Pattern {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Pattern {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        let adj = mesh.vertex_neighbours();
        let mut row_ptr = Vec::with_capacity(adj.len() + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in adj {
            col_idx.extend(row);
            row_ptr.push(col_idx.len());
        }
        Pattern { row_ptr, col_idx }
    }

    pub fn zeros(&self) -> CsrMatrix {
        CsrMatrix { row_ptr: self.row_ptr.clone(), col_idx: self.col_idx.clone(), values: vec![0.0; self.col_idx.len()] }
    }
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        s + self.col_idx[s..e].binary_search(&j).expect("entry outside sparsity pattern")
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.slot(i, j);
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col_idx[s..e].binary_search(&j) {
            Ok(k) => self.values[s + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    /// Replace rows and columns flagged in `fixed` by the identity.
    pub fn pin(&mut self, fixed: &[bool]) {
        for i in 0..self.n() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if fixed[i] || fixed[j] {
                    self.values[k] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
    }

    /// Add `shift` to every diagonal entry.
    pub fn shift_diagonal(&mut self, shift: f64) {
        for i in 0..self.n() {
            let k = self.slot(i, i);
            self.values[k] += shift;
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut d = vec![vec![0.0; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row[self.col_idx[k]] = self.values[k];
            }
        }
        d
    }
}

/// Outcome of [`pcg`].
#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solve `A x = b` for SPD `A` with Jacobi-preconditioned CG, starting from `x`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> CgStats {
    let n = a.n();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgStats { iterations: 0, relative_residual: 0.0 };
    }
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut it = 0;
    let mut rel = norm(&r) / bnorm;
    while rel > rel_tol && it < max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        rel = norm(&r) / bnorm;
    }
    CgStats { iterations: it, relative_residual: rel }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_square;

    #[test]
    fn cg_solves_graph_laplacian_plus_identity() {
        let mesh = build_unit_square(6).unwrap();
        let pat = Pattern::from_mesh(&mesh);
        let mut a = pat.zeros();
        for t in mesh.cells() {
            for &i in t {
                for &j in t {
                    a.add(i, j, if i == j { 2.0 } else { -1.0 });
                }
            }
        }
        a.shift_diagonal(1.0);
        let n = mesh.n_vertices();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&xs, &mut b);
        let mut x = vec![0.0; n];
        let stats = pcg(&a, &b, &mut x, 1e-13, 500);
        assert!(stats.relative_residual <= 1e-13);
        for i in 0..n {
            assert!((x[i] - xs[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn pinning_gives_identity_rows() {
        let mesh = build_unit_square(2).unwrap();
        let mut a = Pattern::from_mesh(&mesh).zeros();
        for t in mesh.cells() {
            for &i in t {
                for &j in t {
                    a.add(i, j, 1.0);
                }
            }
        }
        let mut fixed = vec![false; mesh.n_vertices()];
        fixed[4] = true;
        a.pin(&fixed);
        assert_eq!(a.get(4, 4), 1.0);
        assert_eq!(a.get(4, 0), 0.0);
        assert_eq!(a.get(0, 4), 0.0);
        assert!(a.get(0, 0) > 0.0);
    }
}
