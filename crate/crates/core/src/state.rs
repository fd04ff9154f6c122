//! Inner problem: `Λ(α, φ) = min { I(v) : Φ_{H,∂Ω}(v) = 1 }`.
//!
//! Projected descent on the constraint manifold. Each iteration builds a
//! tangential direction `d = z_I − θ z_J` with `z = M⁻¹ ∇` in a chosen metric
//! `M` and `θ` making `⟨∇J, d⟩ = 0`, clips the trial point at zero, rescales
//! it back onto `J = 1`, and accepts by an Armijo test on `I`. Nodes sitting
//! at zero whose residual points outward are held fixed, so the iteration
//! solves `min I` over nonnegative nodal fields; with the consistent mass
//! matrix and a large weight the unconstrained discrete minimizer may change
//! sign, while the nonnegative one stays close to the continuous state. The default metric is the lagged-coefficient matrix `A(u)`, for
//! which `A(u) u = ∇I(u)`; with `G = H = t²` and unit step this is exactly
//! inverse iteration.
//!
//! Convergence is declared on `‖∇I(u) − μ ∇J(u)‖₂ / max(‖∇J(u)‖₂, 1)` with
//! `μ = ⟨I'(u),u⟩ / ⟨J'(u),u⟩`, restricted to nodes off the active set. For power laws `μ = Λ`; otherwise the two
//! differ because `I/J` is not scale invariant, and the `Λ` form of the
//! residual is reported separately.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::modular::{DesignDensity, Energy, NodalField, Trace, DEFAULT_EPS};
use crate::sparse::{dot, norm, pcg, Pattern};
use crate::young::{unit_level_scaling, YoungFunction};

/// Inner product used to build the tangential descent direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Lagged-coefficient stiffness-plus-mass matrix `A(u)`.
    Secant,
    /// Plain Euclidean nodal inner product.
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Target for the relative Euler–Lagrange residual.
    pub tolerance: f64,
    /// Armijo sufficient-decrease fraction.
    pub armijo_slope: f64,
    /// Backtracking ratio.
    pub backtracking: f64,
    /// Relative tolerance on `J = 1` after projection.
    pub projection_tolerance: f64,
    /// Cap for degenerate coefficients `g(m)/m`.
    pub eps: f64,
    pub metric: Metric,
    /// Largest trial step.
    pub max_step: f64,
    /// Smallest trial step before the line search is declared stalled.
    pub min_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 2000,
            tolerance: 1e-9,
            armijo_slope: 1e-4,
            backtracking: 0.5,
            projection_tolerance: 1e-13,
            eps: DEFAULT_EPS,
            metric: Metric::Secant,
            max_step: 4.0,
            min_step: 1e-14,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.tolerance, self.armijo_slope, self.projection_tolerance, self.eps, self.max_step, self.min_step];
        if self.max_iterations == 0 || positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("solver options must be positive".into()));
        }
        if !(self.armijo_slope < 1.0 && self.backtracking > 0.0 && self.backtracking < 1.0) {
            return Err(Error::InvalidArgument("Armijo fraction and backtracking ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub constraint: f64,
    pub residual: f64,
    /// Step accepted to reach this iterate (0 for the initial point).
    pub step: f64,
}

/// Converged (or best) minimizer of the inner problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub u: NodalField,
    pub lambda: f64,
    /// `‖∇I(u) − Λ∇J(u)‖₂ / max(‖∇J(u)‖₂, 1)`.
    pub el_residual: f64,
    /// `μ = ⟨I'(u),u⟩ / ⟨J'(u),u⟩`, the multiplier of the constrained minimum.
    pub multiplier: f64,
    /// Same as `el_residual` with `μ` in place of `Λ`; the convergence test.
    pub multiplier_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub history: Vec<IterationRecord>,
}

impl EigenPair {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Iteration history as CSV `iter,I,J,residual,step`.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("iter,I,J,residual,step\n");
        for r in &self.history {
            let _ = writeln!(s, "{},{},{},{},{}", r.iter, r.energy, r.constraint, r.residual, r.step);
        }
        s
    }
}

/// Parse a history CSV written by [`EigenPair::history_csv`].
pub fn parse_history_csv(text: &str) -> Result<Vec<IterationRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some("iter,I,J,residual,step") {
        return Err(Error::Parse { line: 1, msg: "expected header `iter,I,J,residual,step`".into() });
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(no, l)| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || Error::Parse { line: no + 2, msg: format!("malformed record `{l}`") };
            if f.len() != 5 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(IterationRecord {
                iter: f[0].parse().map_err(|_| bad())?,
                energy: num(f[1])?,
                constraint: num(f[2])?,
                residual: num(f[3])?,
                step: num(f[4])?,
            })
        })
        .collect()
}

/// Rescale `u` onto `Φ_{H,∂Ω}(s u) = 1`. Returns `(s, s·u)`.
pub fn project_to_constraint(yb: &YoungFunction, mesh: &Mesh, u: &[f64]) -> Result<(f64, NodalField)> {
    project_with_tolerance(yb, mesh, u, 1e-13)
}

fn project_with_tolerance(yb: &YoungFunction, mesh: &Mesh, u: &[f64], tol: f64) -> Result<(f64, NodalField)> {
    let trace = Trace::new(yb, mesh);
    let at_one = trace.value(u);
    let s = if let Some(p) = yb.power_exponent() {
        if !(at_one > 0.0) {
            return Err(Error::NotProjectable);
        }
        at_one.powf(-1.0 / p)
    } else {
        let mut w = u.to_vec();
        unit_level_scaling(
            |s| {
                w.iter_mut().zip(u).for_each(|(w, u)| *w = s * u);
                trace.value(&w)
            },
            at_one,
            yb.p_minus(),
            yb.p_plus(),
            tol,
        )?
    };
    NodalField::new(u.iter().map(|v| v * s).collect()).map(|f| (s, f))
}

/// Relative Euler–Lagrange residual components for a candidate pair.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// `∇I(u) − Λ ∇J(u)` per vertex.
    pub residual: Vec<f64>,
    pub norm: f64,
    pub relative: f64,
    /// Vertex with the largest absolute residual.
    pub worst_vertex: usize,
    /// `⟨I'(u),u⟩ − Λ⟨J'(u),u⟩`, normalized by `⟨J'(u),u⟩`.
    pub pairing_with_u: f64,
    /// `μ = ⟨I'(u),u⟩ / ⟨J'(u),u⟩`.
    pub multiplier: f64,
    /// Relative norm of `∇I(u) − μ ∇J(u)`.
    pub multiplier_relative: f64,
}

/// Reusable solver bound to one growth law pair and mesh.
pub struct StateSolver<'a> {
    young: &'a YoungFunction,
    boundary: &'a YoungFunction,
    mesh: &'a Mesh,
    opts: SolverOptions,
    pattern: Pattern,
}

impl<'a> StateSolver<'a> {
    pub fn new(young: &'a YoungFunction, boundary: &'a YoungFunction, mesh: &'a Mesh, opts: SolverOptions) -> Result<Self> {
        opts.validate()?;
        Ok(StateSolver { young, boundary, mesh, opts, pattern: Pattern::from_mesh(mesh) })
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn mesh(&self) -> &'a Mesh {
        self.mesh
    }

    pub fn young(&self) -> &'a YoungFunction {
        self.young
    }

    pub fn boundary(&self) -> &'a YoungFunction {
        self.boundary
    }

    /// `Λ(α, φ)`.
    pub fn solve(&self, alpha: f64, phi: &[f64], u0: Option<&[f64]>) -> Result<EigenPair> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must be finite and >= 0")));
        }
        if phi.len() != self.mesh.n_cells() {
            return Err(Error::InvalidArgument("density length does not match the mesh".into()));
        }
        self.descend(alpha, phi, None, u0)
    }

    /// `λ(∞, E)`: `α = 0` with all vertices of `hole_cells` pinned to zero.
    pub fn solve_hole(&self, hole_cells: &[usize], u0: Option<&[f64]>) -> Result<EigenPair> {
        let pinned = hole_vertex_mask(self.mesh, hole_cells)?;
        let zero = vec![0.0; self.mesh.n_cells()];
        self.descend(0.0, &zero, Some(&pinned), u0)
    }

    fn initial_guess(&self, pinned: Option<&[bool]>) -> Result<Vec<f64>> {
        let level = self.boundary.inverse(1.0 / self.mesh.boundary_length())?;
        let mut u = vec![level; self.mesh.n_vertices()];
        apply_pins(&mut u, pinned);
        Ok(u)
    }

    fn descend(&self, alpha: f64, phi: &[f64], pinned: Option<&[bool]>, u0: Option<&[f64]>) -> Result<EigenPair> {
        let mesh = self.mesh;
        let opts = &self.opts;
        let energy = Energy { young: self.young, mesh, alpha, phi, eps: opts.eps };
        let trace = Trace { young: self.boundary, mesh, eps: opts.eps };
        let project = |w: &[f64]| project_with_tolerance(self.boundary, mesh, w, opts.projection_tolerance);

        let mut u: Vec<f64> = match u0 {
            Some(u0) if u0.len() == mesh.n_vertices() => u0.iter().map(|v| v.abs()).collect(),
            Some(_) => return Err(Error::InvalidArgument("warm start length does not match the mesh".into())),
            None => self.initial_guess(pinned)?,
        };
        apply_pins(&mut u, pinned);
        if trace.value(&u) == 0.0 {
            // warm start vanished on the free boundary; fall back to the default start
            u = self.initial_guess(pinned)?;
        }
        let mut u = project(&u)?.1.into_inner();
        let mut lam = energy.value(&u);
        let mut history = Vec::new();
        let mut step_prev: f64 = 1.0;
        let mut last_step = 0.0;
        let mut status = SolveStatus::MaxIterations;
        let mut residual;
        let mut lambda_residual;
        let mut mu;
        let mut iter = 0;

        let n = mesh.n_vertices();
        let mut z_i = vec![0.0; n];
        let mut z_j = vec![0.0; n];
        let mut prev: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        loop {
            let mut g_i = energy.gradient(&u).0;
            let mut g_j = trace.gradient(&u).0;
            apply_pins(&mut g_i, pinned);
            apply_pins(&mut g_j, pinned);
            mu = dot(&g_i, &u) / dot(&g_j, &u);
            let mut r: Vec<f64> = g_i.iter().zip(&g_j).map(|(a, b)| a - mu * b).collect();
            // nodes held at zero by a residual pushing outward form the active set
            let fixed: Vec<bool> = (0..n)
                .map(|i| pinned.is_some_and(|p| p[i]) || (u[i] == 0.0 && r[i] > 0.0))
                .collect();
            apply_pins(&mut r, Some(&fixed));
            residual = norm(&r) / norm(&g_j).max(1.0);
            lambda_residual = g_i.iter().zip(&g_j).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt() / norm(&g_j).max(1.0);
            history.push(IterationRecord { iter, energy: lam, constraint: trace.value(&u), residual, step: last_step });
            if residual <= opts.tolerance {
                status = SolveStatus::Converged;
                break;
            }
            if iter >= opts.max_iterations {
                break;
            }

            let t_probe = match opts.metric {
                Metric::Secant => {
                    let mut a = energy.secant_matrix(&self.pattern, &u);
                    a.pin(&fixed);
                    let diag = a.diagonal();
                    let mean = diag.iter().sum::<f64>() / n as f64;
                    a.shift_diagonal(1e-13 * mean);
                    z_i.iter_mut().for_each(|v| *v = 0.0);
                    pcg(&a, &r, &mut z_i, 1e-13, 4 * n + 100);
                    apply_pins(&mut g_j, Some(&fixed));
                    pcg(&a, &g_j, &mut z_j, 1e-13, 4 * n + 100);
                    step_prev.min(opts.max_step)
                }
                Metric::Euclidean => {
                    apply_pins(&mut g_j, Some(&fixed));
                    z_i.copy_from_slice(&r);
                    z_j.copy_from_slice(&g_j);
                    if iter == 0 {
                        0.1 * norm(&u) / norm(&g_i).max(f64::MIN_POSITIVE)
                    } else {
                        step_prev
                    }
                }
            };
            apply_pins(&mut z_i, Some(&fixed));
            apply_pins(&mut z_j, Some(&fixed));
            let theta = dot(&g_j, &z_i) / dot(&g_j, &z_j);
            let s_dir: Vec<f64> = z_i.iter().zip(&z_j).map(|(a, b)| a - theta * b).collect();
            let rs = dot(&r, &s_dir);
            if !(rs > 0.0) {
                status = SolveStatus::Stalled;
                break;
            }
            // Polak–Ribière momentum, restarted whenever it stops being a descent direction
            let mut d = s_dir.clone();
            if let Some((d_prev, r_prev, rs_prev)) = &prev {
                let beta = (rs - dot(r_prev, &s_dir)) / rs_prev;
                if beta > 0.0 && beta.is_finite() {
                    for i in 0..n {
                        d[i] += if fixed[i] { 0.0 } else { beta * d_prev[i] };
                    }
                    let back = dot(&g_j, &d) / dot(&g_j, &z_j);
                    d.iter_mut().zip(&z_j).for_each(|(d, z)| *d -= back * z);
                    if !(dot(&r, &d) > 0.0) {
                        d = s_dir;
                    }
                }
            }
            let slope = dot(&r, &d);

            let trial = |t: f64| -> Option<(Vec<f64>, f64)> {
                let mut w: Vec<f64> = u.iter().zip(&d).map(|(u, d)| (u - t * d).max(0.0)).collect();
                apply_pins(&mut w, pinned);
                let w = project(&w).ok()?.1.into_inner();
                let iw = energy.value(&w);
                iw.is_finite().then_some((w, iw))
            };
            // secant on the derivative of I - ΛJ along -d, probed at t_probe
            let mut t = {
                let v: Vec<f64> = u.iter().zip(&d).map(|(u, d)| u - t_probe * d).collect();
                let gi = energy.gradient(&v).0;
                let gj = trace.gradient(&v).0;
                let dl: f64 = -d.iter().zip(gi.iter().zip(&gj)).map(|(d, (a, b))| d * (a - mu * b)).sum::<f64>();
                let denom = slope + dl;
                if denom > 0.0 && denom.is_finite() {
                    (t_probe * slope / denom).clamp(0.1 * t_probe, opts.max_step)
                } else {
                    t_probe
                }
            };
            let t_first = t;
            let floor = 1e-14 * lam.abs();
            let accepted = loop {
                if let Some((w, iw)) = trial(t) {
                    if iw <= lam - opts.armijo_slope * t * slope + floor {
                        break Some((t, w, iw));
                    }
                }
                t *= opts.backtracking;
                if t < opts.min_step * t_first.max(1.0) {
                    break None;
                }
            };
            match accepted {
                Some((t, w, iw)) => {
                    prev = Some((d.clone(), r.clone(), rs));
                    u = w;
                    lam = iw;
                    step_prev = t;
                    last_step = t;
                    iter += 1;
                }
                None => {
                    status = SolveStatus::Stalled;
                    break;
                }
            }
        }

        Ok(EigenPair {
            u: NodalField::new(u)?,
            lambda: lam,
            el_residual: lambda_residual,
            multiplier: mu,
            multiplier_residual: residual,
            iterations: iter,
            status,
            history,
        })
    }

    /// Euler–Lagrange residual of `pair` for the problem `(α, φ)`.
    pub fn residual_report(&self, alpha: f64, phi: &[f64], pair: &EigenPair, pinned: Option<&[bool]>) -> Result<ResidualReport> {
        let energy = Energy { young: self.young, mesh: self.mesh, alpha, phi, eps: self.opts.eps };
        let trace = Trace { young: self.boundary, mesh: self.mesh, eps: self.opts.eps };
        let j = trace.value(&pair.u);
        if !((j - 1.0).abs() <= 1e-8) {
            return Err(Error::InvalidArgument(format!("field is not admissible: J(u) = {j}")));
        }
        let mut g_i = energy.gradient(&pair.u).0;
        let mut g_j = trace.gradient(&pair.u).0;
        apply_pins(&mut g_i, pinned);
        apply_pins(&mut g_j, pinned);
        let residual: Vec<f64> = g_i.iter().zip(&g_j).map(|(a, b)| a - pair.lambda * b).collect();
        let nrm = norm(&residual);
        let worst_vertex = residual
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let ju = dot(&g_j, &pair.u);
        let mu = dot(&g_i, &pair.u) / ju;
        let scale = norm(&g_j).max(1.0);
        let multiplier_relative = g_i.iter().zip(&g_j).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt() / scale;
        Ok(ResidualReport {
            multiplier: mu,
            multiplier_relative,
            norm: nrm,
            relative: nrm / scale,
            worst_vertex,
            pairing_with_u: (dot(&g_i, &pair.u) - pair.lambda * ju) / ju,
            residual,
        })
    }
}

fn apply_pins(v: &mut [f64], pinned: Option<&[bool]>) {
    if let Some(p) = pinned {
        v.iter_mut().zip(p).filter(|(_, p)| **p).for_each(|(v, _)| *v = 0.0);
    }
}

/// Vertices in the closure of `hole_cells`. Fails if every boundary vertex
/// would be pinned, since no admissible field remains.
pub fn hole_vertex_mask(mesh: &Mesh, hole_cells: &[usize]) -> Result<Vec<bool>> {
    let mut pinned = vec![false; mesh.n_vertices()];
    for &c in hole_cells {
        let t = mesh.cells().get(c).ok_or_else(|| Error::InvalidArgument(format!("hole cell {c} out of range")))?;
        t.iter().for_each(|&v| pinned[v] = true);
    }
    let boundary = mesh.boundary_vertex_mask();
    if boundary.iter().zip(&pinned).filter(|(b, _)| **b).all(|(_, p)| *p) {
        return Err(Error::NotProjectable);
    }
    Ok(pinned)
}

/// `Λ(α, φ)` with a fresh solver.
pub fn solve_state(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    alpha: f64,
    phi: &DesignDensity,
    opts: &SolverOptions,
    u0: Option<&[f64]>,
) -> Result<EigenPair> {
    StateSolver::new(young, boundary, mesh, opts.clone())?.solve(alpha, phi, u0)
}

/// `λ(∞, E)` for `E` the union of `hole_cells`.
pub fn solve_hole_state(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    hole_cells: &[usize],
    opts: &SolverOptions,
    u0: Option<&[f64]>,
) -> Result<EigenPair> {
    StateSolver::new(young, boundary, mesh, opts.clone())?.solve_hole(hole_cells, u0)
}

/// Residual diagnostics for a pair returned by [`solve_state`].
pub fn el_residual_report(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    alpha: f64,
    phi: &DesignDensity,
    pair: &EigenPair,
) -> Result<ResidualReport> {
    StateSolver::new(young, boundary, mesh, SolverOptions::default())?.residual_report(alpha, phi, pair, None)
}
