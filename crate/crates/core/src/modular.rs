//! Modulars on the P1 space and the assembled weak-form residuals.
//!
//! `u` lives on vertices, `φ` on cells. The gradient of a P1 field is
//! cellwise constant; bulk and weighted terms use the degree-2 interior rule
//! and boundary terms the 2-point Gauss rule. Degenerate coefficients
//! `g(m)/m` are evaluated at `max(m, ε)`.

use std::fmt::Write as _;
use std::io::BufRead;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quad::{EDGE_POINTS, EDGE_WEIGHTS, TRI_POINTS, TRI_WEIGHTS};
use crate::sparse::{CsrMatrix, Pattern};
use crate::young::YoungFunction;

/// Default cap for degenerate coefficients.
pub const DEFAULT_EPS: f64 = 1e-10;

/// One value per mesh vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalField(Vec<f64>);

impl NodalField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("nodal field has non-finite entries".into()));
        }
        Ok(NodalField(values))
    }

    pub fn constant(mesh: &Mesh, value: f64) -> Self {
        NodalField(vec![value; mesh.n_vertices()])
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(mesh: &Mesh, f: F) -> Self {
        NodalField(mesh.vertices().iter().map(|&p| f(p)).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        NodalField(self.0.iter().map(|v| v * s).collect())
    }

    pub fn to_csv(&self) -> String {
        write_csv("vertex_id", &self.0)
    }

    pub fn from_csv<R: BufRead>(r: R) -> Result<Self> {
        NodalField::new(read_csv(r, "vertex_id")?)
    }
}

impl Deref for NodalField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Cellwise density `0 ≤ φ ≤ 1` with its volume `∫φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDensity {
    values: Vec<f64>,
    volume: f64,
}

impl DesignDensity {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_cells() {
            return Err(Error::InvalidArgument(format!(
                "density has {} entries for {} cells",
                values.len(),
                mesh.n_cells()
            )));
        }
        if let Some((c, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(Error::InvalidArgument(format!("density value {v} at cell {c} outside [0, 1]")));
        }
        let volume = values.iter().zip(mesh.cell_areas()).map(|(p, a)| p * a).sum();
        Ok(DesignDensity { values, volume })
    }

    /// `φ ≡ c / |Ω|`.
    pub fn uniform(mesh: &Mesh, c: f64) -> Result<Self> {
        let area = mesh.total_area();
        if !(c >= 0.0 && c <= area * (1.0 + 1e-14)) {
            return Err(Error::InvalidArgument(format!("volume {c} outside [0, {area}]")));
        }
        DesignDensity::new(mesh, vec![(c / area).min(1.0); mesh.n_cells()])
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        DesignDensity { values: vec![0.0; mesh.n_cells()], volume: 0.0 }
    }

    /// Indicator of a cell set.
    pub fn indicator(mesh: &Mesh, cells: &[usize]) -> Result<Self> {
        let mut v = vec![0.0; mesh.n_cells()];
        for &c in cells {
            *v.get_mut(c).ok_or_else(|| Error::InvalidArgument(format!("cell {c} out of range")))? = 1.0;
        }
        DesignDensity::new(mesh, v)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Cells with `φ = 1`.
    pub fn full_cells(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&c| self.values[c] == 1.0).collect()
    }

    /// Cells with `0 < φ < 1`.
    pub fn fractional_cells(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&c| self.values[c] > 0.0 && self.values[c] < 1.0).collect()
    }

    /// Cells with `φ > 0`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&c| self.values[c] > 0.0).collect()
    }

    pub fn to_csv(&self) -> String {
        write_csv("cell_id", &self.values)
    }

    pub fn from_csv<R: BufRead>(mesh: &Mesh, r: R) -> Result<Self> {
        DesignDensity::new(mesh, read_csv(r, "cell_id")?)
    }
}

impl Deref for DesignDensity {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// An assembled dual vector, one entry per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradient(pub Vec<f64>);

impl EnergyGradient {
    /// Pairing `⟨F, v⟩` with a nodal test field.
    pub fn pair(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

impl Deref for EnergyGradient {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn write_csv(key: &str, values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 24);
    let _ = writeln!(s, "{key},value");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    s
}

fn read_csv<R: BufRead>(r: R, key: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if no == 0 {
            if line != format!("{key},value") {
                return Err(Error::Parse { line: 1, msg: format!("expected header `{key},value`") });
            }
            continue;
        }
        let (id, val) = line.split_once(',').ok_or_else(|| Error::Parse { line: no + 1, msg: "missing comma".into() })?;
        let id: usize = id.parse().map_err(|_| Error::Parse { line: no + 1, msg: format!("bad id `{id}`") })?;
        if id != out.len() {
            return Err(Error::Parse { line: no + 1, msg: format!("ids must be consecutive, found {id}") });
        }
        out.push(val.parse().map_err(|_| Error::Parse { line: no + 1, msg: format!("bad value `{val}`") })?);
    }
    Ok(out)
}

#[inline]
fn cell_values(mesh: &Mesh, u: &[f64], c: usize) -> [f64; 3] {
    let t = mesh.cells()[c];
    [u[t[0]], u[t[1]], u[t[2]]]
}

#[inline]
fn at_point(vals: &[f64; 3], bary: &[f64; 3]) -> f64 {
    vals[0] * bary[0] + vals[1] * bary[1] + vals[2] * bary[2]
}

#[inline]
fn cell_gradient(mesh: &Mesh, vals: &[f64; 3], c: usize) -> [f64; 2] {
    let g = mesh.basis_gradients(c);
    [
        vals[0] * g[0][0] + vals[1] * g[1][0] + vals[2] * g[2][0],
        vals[0] * g[0][1] + vals[1] * g[1][1] + vals[2] * g[2][1],
    ]
}

/// `∫_cell G(|u|)` for every cell.
pub fn cell_modulars(y: &YoungFunction, mesh: &Mesh, u: &[f64]) -> Vec<f64> {
    (0..mesh.n_cells())
        .map(|c| {
            let vals = cell_values(mesh, u, c);
            let q: f64 = TRI_POINTS.iter().zip(TRI_WEIGHTS).map(|(b, w)| w * y.eval(at_point(&vals, b).abs())).sum();
            mesh.cell_areas()[c] * q
        })
        .collect()
}

/// `Φ_{G,Ω}(u) = ∫ G(|u|)`.
pub fn bulk_modular(y: &YoungFunction, mesh: &Mesh, u: &[f64]) -> f64 {
    cell_modulars(y, mesh, u).iter().sum()
}

/// `Φ_{G,Ω}(|∇u|) = Σ_cells G(|∇u|) · area`.
pub fn gradient_modular(y: &YoungFunction, mesh: &Mesh, u: &[f64]) -> f64 {
    (0..mesh.n_cells())
        .map(|c| {
            let g = cell_gradient(mesh, &cell_values(mesh, u, c), c);
            mesh.cell_areas()[c] * y.eval(g[0].hypot(g[1]))
        })
        .sum()
}

/// `Φ_{G,∂Ω}(u) = ∫_{∂Ω} G(|u|)`.
pub fn trace_modular(yb: &YoungFunction, mesh: &Mesh, u: &[f64]) -> f64 {
    mesh.boundary_edges()
        .iter()
        .zip(mesh.edge_lengths())
        .map(|(&[i, j], &len)| {
            let q: f64 = EDGE_POINTS
                .iter()
                .zip(EDGE_WEIGHTS)
                .map(|(s, w)| w * yb.eval((s * u[i] + (1.0 - s) * u[j]).abs()))
                .sum();
            len * q
        })
        .sum()
}

/// `Φ_{G,φ,Ω}(u) = ∫ φ G(|u|)`.
pub fn weighted_modular(y: &YoungFunction, mesh: &Mesh, phi: &[f64], u: &[f64]) -> f64 {
    cell_modulars(y, mesh, u).iter().zip(phi).map(|(q, p)| p * q).sum()
}

/// `Φ_{1,G,Ω}(u) = ∫ G(|u|) + G(|∇u|)`.
pub fn sobolev_modular(y: &YoungFunction, mesh: &Mesh, u: &[f64]) -> f64 {
    bulk_modular(y, mesh, u) + gradient_modular(y, mesh, u)
}

/// The functional `I(v) = Φ_{1,G,Ω}(v) + α Φ_{G,φ,Ω}(v)` and its derivative.
#[derive(Debug, Clone, Copy)]
pub struct Energy<'a> {
    pub young: &'a YoungFunction,
    pub mesh: &'a Mesh,
    pub alpha: f64,
    pub phi: &'a [f64],
    pub eps: f64,
}

impl<'a> Energy<'a> {
    pub fn new(young: &'a YoungFunction, mesh: &'a Mesh, alpha: f64, phi: &'a [f64]) -> Self {
        Energy { young, mesh, alpha, phi, eps: DEFAULT_EPS }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        let (y, mesh) = (self.young, self.mesh);
        let mut acc = 0.0;
        for c in 0..mesh.n_cells() {
            let vals = cell_values(mesh, u, c);
            let g = cell_gradient(mesh, &vals, c);
            let weight = 1.0 + self.alpha * self.phi[c];
            let q: f64 = TRI_POINTS.iter().zip(TRI_WEIGHTS).map(|(b, w)| w * y.eval(at_point(&vals, b).abs())).sum();
            acc += mesh.cell_areas()[c] * (y.eval(g[0].hypot(g[1])) + weight * q);
        }
        acc
    }

    /// Assembled `I'(u)`: `⟨I'(u), v⟩ = ∫ g(|∇u|)/|∇u| ∇u·∇v + (1+αφ) g(|u|)/|u| u v`.
    pub fn gradient(&self, u: &[f64]) -> EnergyGradient {
        let (y, mesh) = (self.young, self.mesh);
        let mut out = vec![0.0; mesh.n_vertices()];
        for c in 0..mesh.n_cells() {
            let t = mesh.cells()[c];
            let vals = cell_values(mesh, u, c);
            let g = cell_gradient(mesh, &vals, c);
            let area = mesh.cell_areas()[c];
            let flux = y.secant_coefficient(g[0].hypot(g[1]), self.eps);
            let basis = mesh.basis_gradients(c);
            let weight = 1.0 + self.alpha * self.phi[c];
            let mut local = [0.0; 3];
            for k in 0..3 {
                local[k] += flux * (g[0] * basis[k][0] + g[1] * basis[k][1]);
            }
            for (b, w) in TRI_POINTS.iter().zip(TRI_WEIGHTS) {
                let uq = at_point(&vals, b);
                let r = w * weight * y.secant_coefficient(uq.abs(), self.eps) * uq;
                for k in 0..3 {
                    local[k] += r * b[k];
                }
            }
            for k in 0..3 {
                out[t[k]] += area * local[k];
            }
        }
        EnergyGradient(out)
    }

    /// Lagged-coefficient matrix `A(u)` with `A(u) u = I'(u)`:
    /// `A_ab = ∫ g(|∇u|)/|∇u| ∇ψ_a·∇ψ_b + (1+αφ) g(|u|)/|u| ψ_a ψ_b`.
    pub fn secant_matrix(&self, pattern: &Pattern, u: &[f64]) -> CsrMatrix {
        let (y, mesh) = (self.young, self.mesh);
        let mut a = pattern.zeros();
        for c in 0..mesh.n_cells() {
            let t = mesh.cells()[c];
            let vals = cell_values(mesh, u, c);
            let g = cell_gradient(mesh, &vals, c);
            let area = mesh.cell_areas()[c];
            let flux = y.secant_coefficient(g[0].hypot(g[1]), self.eps);
            let basis = mesh.basis_gradients(c);
            let weight = 1.0 + self.alpha * self.phi[c];
            let mut local = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] = flux * (basis[i][0] * basis[j][0] + basis[i][1] * basis[j][1]);
                }
            }
            for (b, w) in TRI_POINTS.iter().zip(TRI_WEIGHTS) {
                let uq = at_point(&vals, b);
                let r = w * weight * y.secant_coefficient(uq.abs(), self.eps);
                for i in 0..3 {
                    for j in 0..3 {
                        local[i][j] += r * b[i] * b[j];
                    }
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    a.add(t[i], t[j], area * local[i][j]);
                }
            }
        }
        a
    }
}

/// The constraint functional `J(v) = Φ_{H,∂Ω}(v)` and its derivative.
#[derive(Debug, Clone, Copy)]
pub struct Trace<'a> {
    pub young: &'a YoungFunction,
    pub mesh: &'a Mesh,
    pub eps: f64,
}

impl<'a> Trace<'a> {
    pub fn new(young: &'a YoungFunction, mesh: &'a Mesh) -> Self {
        Trace { young, mesh, eps: DEFAULT_EPS }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        trace_modular(self.young, self.mesh, u)
    }

    /// `⟨J'(u), v⟩ = ∫_{∂Ω} g(|u|)/|u| u v`.
    pub fn gradient(&self, u: &[f64]) -> EnergyGradient {
        let mesh = self.mesh;
        let mut out = vec![0.0; mesh.n_vertices()];
        for (&[i, j], &len) in mesh.boundary_edges().iter().zip(mesh.edge_lengths()) {
            for (s, w) in EDGE_POINTS.iter().zip(EDGE_WEIGHTS) {
                let uq = s * u[i] + (1.0 - s) * u[j];
                let r = len * w * self.young.secant_coefficient(uq.abs(), self.eps) * uq;
                out[i] += r * s;
                out[j] += r * (1.0 - s);
            }
        }
        EnergyGradient(out)
    }
}

pub fn energy(y: &YoungFunction, mesh: &Mesh, alpha: f64, phi: &[f64], u: &[f64]) -> f64 {
    Energy::new(y, mesh, alpha, phi).value(u)
}

pub fn energy_gradient(y: &YoungFunction, mesh: &Mesh, alpha: f64, phi: &[f64], u: &[f64]) -> EnergyGradient {
    Energy::new(y, mesh, alpha, phi).gradient(u)
}

pub fn trace_gradient(yb: &YoungFunction, mesh: &Mesh, u: &[f64]) -> EnergyGradient {
    Trace::new(yb, mesh).gradient(u)
}
