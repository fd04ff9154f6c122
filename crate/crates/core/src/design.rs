//! Outer problem `Λ(α, c) = inf { Λ(α, φ) : 0 ≤ φ ≤ 1, ∫φ = c }`.
//!
//! The density step is a bathtub fill over cells ordered by the per-cell
//! level `G⁻¹(⨍_T G(|u|))`, which is the exact minimizer of the discrete
//! weighted modular `Σ φ_T ∫_T G(|u|)`. The level is reported in the units of
//! `u`, so thresholds and sublevel checks read like values of the state.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Domain, Mesh};
use crate::modular::{cell_modulars, DesignDensity, NodalField};
use crate::state::{EigenPair, SolveStatus, SolverOptions, StateSolver};
use crate::young::YoungFunction;

const VOLUME_SLACK: f64 = 1e-13;

/// Per-cell level `G⁻¹(⨍_T G(|u|))`.
pub fn cell_levels(young: &YoungFunction, mesh: &Mesh, u: &[f64]) -> Vec<f64> {
    cell_modulars(young, mesh, u)
        .iter()
        .zip(mesh.cell_areas())
        .map(|(m, a)| young.inverse(m / a).unwrap_or(0.0))
        .collect()
}

/// Per-cell average of the three vertex values.
pub fn barycentric_averages(mesh: &Mesh, u: &[f64]) -> Vec<f64> {
    mesh.cells().iter().map(|t| (u[t[0]] + u[t[1]] + u[t[2]]) / 3.0).collect()
}

/// Cells sorted by ascending key, ties by index.
fn fill_order(keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    order
}

fn check_volume(mesh: &Mesh, c: f64) -> Result<()> {
    let total = mesh.total_area();
    if !(c >= 0.0) || c > total * (1.0 + VOLUME_SLACK) {
        return Err(Error::InvalidArgument(format!("volume c = {c} outside [0, {total}]")));
    }
    Ok(())
}

/// Greedy fill of the lowest-key cells up to volume `c`, with one
/// fractional cell. Returns the density and the key of the last touched
/// cell (`-∞` when `c = 0`).
pub fn bathtub_step(mesh: &Mesh, keys: &[f64], c: f64) -> Result<(DesignDensity, f64)> {
    check_volume(mesh, c)?;
    if keys.len() != mesh.n_cells() {
        return Err(Error::InvalidArgument("one key per cell expected".into()));
    }
    let areas = mesh.cell_areas();
    let slack = VOLUME_SLACK * mesh.total_area();
    let mut phi = vec![0.0; keys.len()];
    let mut remaining = c;
    let mut t = f64::NEG_INFINITY;
    for cell in fill_order(keys) {
        if remaining <= slack {
            break;
        }
        t = keys[cell];
        if areas[cell] <= remaining + slack {
            phi[cell] = 1.0;
            remaining -= areas[cell];
        } else {
            phi[cell] = remaining / areas[cell];
            break;
        }
    }
    Ok((DesignDensity::new(mesh, phi)?, t))
}

/// Whole-cell bathtub: the lowest-key cells whose total area first reaches
/// `c`. The last cell is included fully, so `|E| ∈ [c, c + max area)`.
pub fn bathtub_cells(mesh: &Mesh, keys: &[f64], c: f64) -> Result<(Vec<usize>, f64)> {
    check_volume(mesh, c)?;
    let areas = mesh.cell_areas();
    let slack = VOLUME_SLACK * mesh.total_area();
    let mut chosen = Vec::new();
    let mut filled = 0.0;
    let mut t = f64::NEG_INFINITY;
    for cell in fill_order(keys) {
        if filled >= c - slack {
            break;
        }
        chosen.push(cell);
        filled += areas[cell];
        t = keys[cell];
    }
    chosen.sort_unstable();
    Ok((chosen, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterInit {
    /// Bathtub of the `α = 0` state.
    FreeState,
    /// `φ ≡ c/|Ω|`.
    Uniform,
    /// Free-state bathtub plus boundary caps in [`CAP_DIRECTIONS`]
    /// directions; the lowest converged value wins.
    MultiStart,
}

pub const CAP_DIRECTIONS: usize = 8;

/// Bathtub keys that fill from the boundary inward along direction `angle`.
pub fn cap_keys(mesh: &Mesh, angle: f64) -> Vec<f64> {
    let o = mesh.center();
    let (s, c) = angle.sin_cos();
    (0..mesh.n_cells())
        .map(|t| {
            let b = mesh.barycenter(t);
            -((b[0] - o[0]) * c + (b[1] - o[1]) * s)
        })
        .collect()
}

/// Keys of every boundary-cap start.
pub fn cap_starts(mesh: &Mesh) -> Vec<Vec<f64>> {
    (0..CAP_DIRECTIONS).map(|k| cap_keys(mesh, 2.0 * PI * k as f64 / CAP_DIRECTIONS as f64)).collect()
}

/// Lowest value among candidate results, keeping the earlier candidate on
/// near-ties; the first error is returned when none succeeded.
pub(crate) fn lowest<T>(candidates: impl IntoIterator<Item = Result<T>>, value: impl Fn(&T) -> f64) -> Result<T> {
    let mut best: Option<T> = None;
    let mut first_err = None;
    for c in candidates {
        match c {
            Ok(c) => {
                if best.as_ref().map_or(true, |b| value(&c) < value(b) - 1e-9 * value(b).abs()) {
                    best = Some(c);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or_else(|| Error::InvalidArgument("no candidate starts".into())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OuterOptions {
    pub max_iterations: usize,
    /// Relative change of `Λ` between outer steps.
    pub tolerance: f64,
    pub init: OuterInit,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions { max_iterations: 200, tolerance: 1e-10, init: OuterInit::MultiStart }
    }
}

/// Output of [`alternate_optimize`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimalPair {
    pub u: NodalField,
    pub phi: DesignDensity,
    pub lambda: f64,
    /// Level of the last filled cell.
    pub threshold: f64,
    pub alpha: f64,
    pub c: f64,
    /// `Λ` after each state solve.
    pub outer_history: Vec<f64>,
    /// Final inner solve.
    pub state: EigenPair,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PairSummary {
    pub lambda: f64,
    pub t: f64,
    pub c: f64,
    pub alpha: f64,
    pub outer_iters: usize,
}

impl OptimalPair {
    pub fn outer_iterations(&self) -> usize {
        self.outer_history.len()
    }

    pub fn summary(&self) -> PairSummary {
        PairSummary {
            lambda: self.lambda,
            t: self.threshold,
            c: self.c,
            alpha: self.alpha,
            outer_iters: self.outer_iterations(),
        }
    }
}

fn require_converged(pair: &EigenPair, context: &str) -> Result<()> {
    match pair.status {
        SolveStatus::Converged => Ok(()),
        s => Err(Error::NonConvergence(format!(
            "{context}: inner solve {s:?} after {} iterations, residual {:.3e}",
            pair.iterations, pair.multiplier_residual
        ))),
    }
}

/// Alternating minimization for `Λ(α, c)`.
pub fn alternate_optimize(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    alpha: f64,
    c: f64,
    opts: &SolverOptions,
    outer: &OuterOptions,
) -> Result<OptimalPair> {
    let solver = StateSolver::new(young, boundary, mesh, opts.clone())?;
    optimize_with(&solver, alpha, c, outer)
}

/// [`alternate_optimize`] reusing a prepared state solver.
pub fn optimize_with(solver: &StateSolver, alpha: f64, c: f64, outer: &OuterOptions) -> Result<OptimalPair> {
    let mesh = solver.mesh();
    check_volume(mesh, c)?;
    match outer.init {
        OuterInit::FreeState => {
            let free = solver.solve(0.0, &DesignDensity::zeros(mesh), None)?;
            require_converged(&free, "free state")?;
            let (phi, _) = bathtub_step(mesh, &cell_levels(solver.young(), mesh, &free.u), c)?;
            optimize_from(solver, alpha, c, outer, phi, Some(free.u.into_inner()))
        }
        OuterInit::Uniform => {
            let phi = DesignDensity::uniform(mesh, c / mesh.total_area())?;
            optimize_from(solver, alpha, c, outer, phi, None)
        }
        OuterInit::MultiStart => {
            let single = OuterOptions { init: OuterInit::FreeState, ..outer.clone() };
            let caps = cap_starts(mesh)
                .into_iter()
                .map(|keys| optimize_from(solver, alpha, c, outer, bathtub_step(mesh, &keys, c)?.0, None));
            lowest(std::iter::once(optimize_with(solver, alpha, c, &single)).chain(caps), |p| p.lambda)
        }
    }
}

/// Outer loop started from the density `phi` and optional state `u0`.
pub fn optimize_from(
    solver: &StateSolver,
    alpha: f64,
    c: f64,
    outer: &OuterOptions,
    phi: DesignDensity,
    u0: Option<Vec<f64>>,
) -> Result<OptimalPair> {
    let mesh = solver.mesh();
    let young = solver.young();
    check_volume(mesh, c)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be >= 0")));
    }
    if (phi.volume() - c).abs() > 1e-10 * mesh.total_area() {
        return Err(Error::InvalidArgument(format!("initial density has volume {} instead of {c}", phi.volume())));
    }
    let (mut phi, mut u0) = (phi, u0);
    let mut history = Vec::new();
    for k in 0..outer.max_iterations {
        let pair = solver.solve(alpha, &phi, u0.as_deref())?;
        require_converged(&pair, &format!("outer iteration {k}"))?;
        history.push(pair.lambda);
        let (next, t) = bathtub_step(mesh, &cell_levels(young, mesh, &pair.u), c)?;
        let stable = next == phi;
        let settled = history.len() >= 2 && {
            let prev = history[history.len() - 2];
            (prev - pair.lambda).abs() <= outer.tolerance * pair.lambda.abs()
        };
        if stable && settled {
            return Ok(OptimalPair {
                u: pair.u.clone(),
                phi: next,
                lambda: pair.lambda,
                threshold: t,
                alpha,
                c,
                outer_history: history,
                state: pair,
            });
        }
        u0 = Some(pair.u.into_inner());
        phi = next;
    }
    Err(Error::NonConvergence(format!("outer loop did not settle in {} iterations", outer.max_iterations)))
}

/// Perturbation `f` of a density with `Σ f·|T| = 0`, `f ≤ 0` on `{φ = 1}`
/// and `f ≥ 0` on `{φ = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    values: Vec<f64>,
}

const DIRECTION_TOL: f64 = 1e-12;

impl Direction {
    pub fn new(mesh: &Mesh, phi: &DesignDensity, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_cells() {
            return Err(Error::InvalidArgument("one direction value per cell expected".into()));
        }
        let mean: f64 = values.iter().zip(mesh.cell_areas()).map(|(f, a)| f * a).sum();
        if mean.abs() > DIRECTION_TOL {
            return Err(Error::InvalidArgument(format!("direction has nonzero integral {mean:e}")));
        }
        for (c, (&f, &p)) in values.iter().zip(phi.values()).enumerate() {
            if (p == 1.0 && f > DIRECTION_TOL) || (p == 0.0 && f < -DIRECTION_TOL) {
                return Err(Error::InvalidArgument(format!("direction sign violates the density bounds at cell {c}")));
            }
        }
        Ok(Direction { values })
    }

    pub fn zero(mesh: &Mesh) -> Self {
        Direction { values: vec![0.0; mesh.n_cells()] }
    }

    /// Random mass transfer from some `{φ = 1}` cells to some `{φ = 0}` cells.
    pub fn random<R: Rng>(mesh: &Mesh, phi: &DesignDensity, rng: &mut R) -> Result<Self> {
        let areas = mesh.cell_areas();
        let mut values = vec![0.0; mesh.n_cells()];
        let (mut gain, mut loss) = (0.0, 0.0);
        for (c, &p) in phi.values().iter().enumerate() {
            if rng.gen_bool(0.5) {
                let w = rng.gen_range(0.05..1.0);
                if p == 0.0 {
                    values[c] = w;
                    gain += w * areas[c];
                } else if p == 1.0 {
                    values[c] = -w;
                    loss += w * areas[c];
                }
            }
        }
        if gain == 0.0 || loss == 0.0 {
            return Err(Error::InvalidArgument("density admits no two-sided transfer".into()));
        }
        let scale = loss / gain;
        values.iter_mut().filter(|v| **v > 0.0).for_each(|v| *v *= scale);
        Ok(Direction { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `φ + t f`, clipped against roundoff.
    pub fn perturb(&self, mesh: &Mesh, phi: &DesignDensity, t: f64) -> Result<DesignDensity> {
        let v = phi.values().iter().zip(&self.values).map(|(p, f)| (p + t * f).clamp(0.0, 1.0)).collect();
        DesignDensity::new(mesh, v)
    }
}

/// `α Σ_T f_T ∫_T G(|u|)`: right derivative of `Λ(α, ·)` at the density
/// whose minimizer is `u`, in direction `f`.
pub fn directional_derivative(young: &YoungFunction, mesh: &Mesh, alpha: f64, u: &[f64], f: &Direction) -> f64 {
    alpha * cell_modulars(young, mesh, u).iter().zip(&f.values).map(|(m, f)| m * f).sum::<f64>()
}

/// Total area of cells with value in `[s − δ, s + δ]`.
pub fn level_set_measure(mesh: &Mesh, cell_values: &[f64], s: f64, delta: f64) -> f64 {
    cell_values
        .iter()
        .zip(mesh.cell_areas())
        .filter(|(v, _)| (**v - s).abs() <= delta)
        .map(|(_, a)| a)
        .sum()
}

/// Area of the symmetric difference between `φ` and its closest cap
/// rearrangement: on every annulus of the disk mesh the design mass is kept
/// and refilled by angular distance from an axis, minimized over axes.
pub fn symmetry_deviation(mesh: &Mesh, phi: &DesignDensity) -> Result<f64> {
    let Domain::Disk { rings, .. } = mesh.domain() else {
        return Err(Error::InvalidArgument("symmetry deviation needs a disk mesh".into()));
    };
    let areas = mesh.cell_areas();
    let mut by_ring: Vec<Vec<usize>> = vec![Vec::new(); rings];
    for (c, cell) in mesh.cells().iter().enumerate() {
        let r = cell.iter().map(|&v| mesh.vertices()[v][0].hypot(mesh.vertices()[v][1])).fold(0.0, f64::max);
        let j = ((r * rings as f64 - 1e-9).ceil() as usize).clamp(1, rings);
        by_ring[j - 1].push(c);
    }
    let angle: Vec<f64> = (0..mesh.n_cells())
        .map(|c| {
            let b = mesh.barycenter(c);
            b[1].atan2(b[0])
        })
        .collect();
    let axes = 24 * rings;
    let mut best = f64::INFINITY;
    for k in 0..axes {
        let axis = -PI + 2.0 * PI * k as f64 / axes as f64;
        let mut dev = 0.0;
        for ring in &by_ring {
            let mut mass: f64 = ring.iter().map(|&c| phi.values()[c] * areas[c]).sum();
            let mut order = ring.clone();
            let dist = |c: usize| {
                let d = (angle[c] - axis).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d)
            };
            order.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
            for c in order {
                let fill = (mass / areas[c]).clamp(0.0, 1.0);
                mass -= fill * areas[c];
                dev += (phi.values()[c] - fill).abs() * areas[c];
            }
        }
        best = best.min(dev);
    }
    Ok(best)
}

/// Tensor grid on the unit disk: rings `r_i = i/n_r` (`i = 0..=n_r`) and
/// midpoint angles `θ_j = −π + (j + ½)·2π/n_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub rings: usize,
    pub angles: usize,
}

impl PolarGrid {
    pub fn new(rings: usize, angles: usize) -> Result<Self> {
        if rings < 2 || angles < 4 || angles % 4 != 0 {
            return Err(Error::InvalidArgument("polar grid needs >= 2 rings and a multiple of 4 angles".into()));
        }
        Ok(PolarGrid { rings, angles })
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 / self.rings as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        -PI + (j as f64 + 0.5) * 2.0 * PI / self.angles as f64
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.rings as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.angles as f64
    }

    /// Spacing used for the `O(h)` quadrature tolerance.
    pub fn h(&self) -> f64 {
        self.dr().max(self.dtheta())
    }

    fn len(&self) -> usize {
        (self.rings + 1) * self.angles
    }

    /// Angle indices ordered by `|θ|`, positive angle first within a pair.
    fn cap_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.angles).collect();
        order.sort_by(|&a, &b| self.angle(a).abs().total_cmp(&self.angle(b).abs()).then(b.cmp(&a)));
        order
    }
}

/// Samples on a [`PolarGrid`], ring-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    grid: PolarGrid,
    values: Vec<f64>,
}

impl PolarField {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: PolarGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..=grid.rings {
            for j in 0..grid.angles {
                values.push(f(grid.radius(i), grid.angle(j)));
            }
        }
        PolarField { grid, values }
    }

    pub fn from_values(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("polar field size does not match the grid".into()));
        }
        Ok(PolarField { grid, values })
    }

    /// Sample a P1 field on a disk mesh.
    pub fn sample(grid: PolarGrid, mesh: &Mesh, u: &[f64]) -> Result<Self> {
        if !matches!(mesh.domain(), Domain::Disk { .. }) {
            return Err(Error::InvalidArgument("polar sampling requires a disk mesh".into()));
        }
        let o = mesh.center();
        Ok(Self::from_fn(grid, |r, th| mesh.interpolate(u, [o[0] + r * th.cos(), o[1] + r * th.sin()])))
    }

    pub fn grid(&self) -> PolarGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ring(&self, i: usize) -> &[f64] {
        &self.values[i * self.grid.angles..(i + 1) * self.grid.angles]
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.angles + j]
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> PolarField {
        PolarField { grid: self.grid, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    /// CSV `ring,angle,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ring,angle,value\n");
        for i in 0..=self.grid.rings {
            for j in 0..self.grid.angles {
                let _ = writeln!(s, "{i},{j},{}", self.at(i, j));
            }
        }
        s
    }

    pub fn from_csv(grid: PolarGrid, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("ring,angle,value") {
            return Err(Error::Parse { line: 1, msg: "expected header `ring,angle,value`".into() });
        }
        let mut values = vec![f64::NAN; grid.len()];
        for (no, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || Error::Parse { line: no + 2, msg: format!("malformed record `{line}`") };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            let i: usize = f[0].parse().map_err(|_| bad())?;
            let j: usize = f[1].parse().map_err(|_| bad())?;
            if i > grid.rings || j >= grid.angles {
                return Err(bad());
            }
            values[i * grid.angles + j] = f[2].parse().map_err(|_| bad())?;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse { line: 0, msg: "missing polar samples".into() });
        }
        Ok(PolarField { grid, values })
    }
}

fn rearrange(u: &PolarField, decreasing: bool) -> PolarField {
    let g = u.grid;
    let order = g.cap_order();
    let mut out = vec![0.0; u.values.len()];
    for i in 0..=g.rings {
        let mut ring = u.ring(i).to_vec();
        ring.sort_by(|a, b| if decreasing { b.total_cmp(a) } else { a.total_cmp(b) });
        for (v, &j) in ring.iter().zip(&order) {
            out[i * g.angles + j] = *v;
        }
    }
    PolarField { grid: g, values: out }
}

/// Cap symmetrization about the positive `x` axis: on each ring the values
/// are rearranged to decrease in `|θ|`.
pub fn symmetrize_disk(u: &PolarField) -> PolarField {
    rearrange(u, true)
}

/// Rearrangement increasing in `|θ|`; equals `−(−f)*`.
pub fn lower_symmetrize(f: &PolarField) -> PolarField {
    rearrange(f, false)
}

/// `∫_{B₁} F(u) dx`: trapezoid in `r`, midpoint in `θ`.
pub fn polar_bulk(u: &PolarField, f: impl Fn(f64) -> f64) -> f64 {
    let g = u.grid;
    let mut total = 0.0;
    for i in 1..=g.rings {
        let w = if i == g.rings { 0.5 } else { 1.0 } * g.dr() * g.radius(i);
        total += w * u.ring(i).iter().map(|v| f(*v)).sum::<f64>() * g.dtheta();
    }
    total
}

/// `∫_{∂B₁} F(u) dH¹` on the outer ring.
pub fn polar_boundary(u: &PolarField, f: impl Fn(f64) -> f64) -> f64 {
    u.ring(u.grid.rings).iter().map(|v| f(*v)).sum::<f64>() * u.grid.dtheta()
}

/// `∫ F(|∇u|)` with `|∇u|` from centred differences on each grid cell.
pub fn polar_gradient(u: &PolarField, f: impl Fn(f64) -> f64) -> f64 {
    let g = u.grid;
    let (dr, dt) = (g.dr(), g.dtheta());
    let mut total = 0.0;
    for i in 0..g.rings {
        let r = 0.5 * (g.radius(i) + g.radius(i + 1));
        for j in 0..g.angles {
            let jn = (j + 1) % g.angles;
            let ur = 0.5 * ((u.at(i + 1, j) - u.at(i, j)) + (u.at(i + 1, jn) - u.at(i, jn))) / dr;
            let ut = 0.5 * ((u.at(i, jn) - u.at(i, j)) + (u.at(i + 1, jn) - u.at(i + 1, j))) / dt;
            total += f(ur.hypot(ut / r)) * r * dr * dt;
        }
    }
    total
}

/// `∫ w F(u)` with nodal weight `w`.
pub fn polar_weighted(u: &PolarField, w: &PolarField, f: impl Fn(f64) -> f64) -> f64 {
    let prod = PolarField { grid: u.grid, values: u.values.iter().zip(&w.values).map(|(u, w)| w * f(*u)).collect() };
    polar_bulk(&prod, |v| v)
}

/// One comparison of a symmetrization property.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Comparison {
    pub original: f64,
    pub symmetrized: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Comparison {
    fn equality(original: f64, symmetrized: f64, tolerance: f64) -> Self {
        Comparison { original, symmetrized, tolerance, pass: (original - symmetrized).abs() <= tolerance }
    }

    fn at_most(original: f64, symmetrized: f64, tolerance: f64) -> Self {
        Comparison { original, symmetrized, tolerance, pass: symmetrized <= original + tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrizationReport {
    /// `Φ_G(u*) = Φ_G(u)`.
    pub bulk: Comparison,
    /// `Φ_{G,∂B}(u*) = Φ_{G,∂B}(u)`.
    pub boundary: Comparison,
    /// `Φ_G(|∇u*|) ≤ Φ_G(|∇u|)`.
    pub gradient: Comparison,
    /// `Φ_{G,(αχ_D)_*}(u*) ≤ Φ_{G,αχ_D}(u)`.
    pub weighted: Comparison,
    pub h: f64,
}

impl SymmetrizationReport {
    pub fn pass(&self) -> bool {
        self.bulk.pass && self.boundary.pass && self.gradient.pass && self.weighted.pass
    }
}

/// Check the four rearrangement properties for `u ≥ 0` and the weight
/// `α χ_D` (`d_mask` is a polar field with values in `{0, 1}`).
pub fn symmetrization_checks(young: &YoungFunction, u: &PolarField, alpha: f64, d_mask: &PolarField) -> Result<SymmetrizationReport> {
    if u.values.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("symmetrization needs a nonnegative field".into()));
    }
    if u.grid != d_mask.grid {
        return Err(Error::InvalidArgument("weight grid differs from field grid".into()));
    }
    let g = |t: f64| young.eval(t);
    let us = symmetrize_disk(u);
    let weight = d_mask.map(|v| alpha * v);
    let weight_low = lower_symmetrize(&weight);
    let h = u.grid.h();
    let scale = |a: f64, b: f64| h * a.abs().max(b.abs());

    let (b0, b1) = (polar_bulk(u, g), polar_bulk(&us, g));
    let (s0, s1) = (polar_boundary(u, g), polar_boundary(&us, g));
    let (g0, g1) = (polar_gradient(u, g), polar_gradient(&us, g));
    let (w0, w1) = (polar_weighted(u, &weight, g), polar_weighted(&us, &weight_low, g));
    Ok(SymmetrizationReport {
        bulk: Comparison::equality(b0, b1, scale(b0, b1).max(1e-12)),
        boundary: Comparison::equality(s0, s1, scale(s0, s1).max(1e-12)),
        gradient: Comparison::at_most(g0, g1, scale(g0, g1).max(1e-12)),
        weighted: Comparison::at_most(w0, w1, scale(w0, w1).max(1e-12)),
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_unit_disk, build_unit_square};

    fn four_cells() -> Mesh {
        // unit square split into 4 right triangles of area 1/4 around the centre
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let cells = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        let edges = vec![[0, 1], [1, 2], [2, 3], [3, 0]];
        Mesh::from_parts(v, cells, edges, Domain::Loaded).unwrap()
    }

    #[test]
    fn bathtub_examples() {
        let m = four_cells();
        let keys = [1.0, 2.0, 3.0, 4.0];
        let (phi, t) = bathtub_step(&m, &keys, 0.5).unwrap();
        assert_eq!(phi.values(), &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(t, 2.0);
        let (phi, t) = bathtub_step(&m, &keys, 0.3).unwrap();
        assert!((phi.values()[1] - 0.2).abs() < 1e-15);
        assert_eq!(&phi.values()[..1], &[1.0]);
        assert_eq!(t, 2.0);
        let (phi, t) = bathtub_step(&m, &keys, 0.0).unwrap();
        assert!(phi.values().iter().all(|v| *v == 0.0));
        assert_eq!(t, f64::NEG_INFINITY);
        assert!(bathtub_step(&m, &keys, -0.1).is_err());
        assert!(bathtub_step(&m, &keys, 1.1).is_err());
        let (phi, _) = bathtub_step(&m, &keys, 1.0).unwrap();
        assert!(phi.values().iter().all(|v| *v == 1.0));
        // ties broken by index
        let (phi, _) = bathtub_step(&m, &[1.0, 1.0, 1.0, 1.0], 0.25).unwrap();
        assert_eq!(phi.values(), &[1.0, 0.0, 0.0, 0.0]);
        let (cells, _) = bathtub_cells(&m, &keys, 0.3).unwrap();
        assert_eq!(cells, vec![0, 1]);
    }

    #[test]
    fn direction_validation() {
        let m = four_cells();
        let phi = DesignDensity::new(&m, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(Direction::new(&m, &phi, vec![-1.0, 0.0, 1.0, 0.0]).is_ok());
        assert!(Direction::new(&m, &phi, vec![1.0, 0.0, -1.0, 0.0]).is_err());
        assert!(Direction::new(&m, &phi, vec![-1.0, 0.0, 0.5, 0.0]).is_err());
        let y = YoungFunction::power(2.0);
        let u = NodalField::constant(&m, 1.0);
        assert_eq!(directional_derivative(&y, &m, 3.0, &u, &Direction::zero(&m)), 0.0);
    }

    #[test]
    fn level_set_strip() {
        let m = build_unit_square(40).unwrap();
        let u = NodalField::from_fn(&m, |p| p[0]);
        let avg = barycentric_averages(&m, &u);
        assert!((level_set_measure(&m, &avg, 0.5, 0.1) - 0.2).abs() < 0.03);
        assert_eq!(level_set_measure(&m, &avg, 3.0, 0.1), 0.0);
    }

    #[test]
    fn cell_levels_of_constant_field() {
        let m = build_unit_square(3).unwrap();
        let y = YoungFunction::power_log(2.0).unwrap();
        let lv = cell_levels(&y, &m, &NodalField::constant(&m, 0.7));
        assert!(lv.iter().all(|v| (v - 0.7).abs() < 1e-10));
    }

    #[test]
    fn symmetrization_examples() {
        let grid = PolarGrid::new(16, 32).unwrap();
        let radial = PolarField::from_fn(grid, |r, _| 1.0 - r * r);
        assert_eq!(symmetrize_disk(&radial), radial);
        let half = PolarField::from_fn(grid, |_, th| if th.cos() > 0.0 { 1.0 } else { 0.0 });
        assert_eq!(symmetrize_disk(&half), half);
        let y = YoungFunction::power(2.0);
        let empty = PolarField::from_fn(grid, |_, _| 0.0);
        let rep = symmetrization_checks(&y, &radial, 3.0, &empty).unwrap();
        assert!(rep.pass());
        let ramp = PolarField::from_fn(grid, |r, th| (r * th.cos()).max(0.0));
        let rep = symmetrization_checks(&y, &ramp, 3.0, &half).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let neg = PolarField::from_fn(grid, |_, _| -1.0);
        assert!(symmetrization_checks(&y, &neg, 1.0, &empty).is_err());
        assert!(PolarGrid::new(4, 30).is_err());
    }

    #[test]
    fn polar_csv_round_trip() {
        let grid = PolarGrid::new(3, 8).unwrap();
        let f = PolarField::from_fn(grid, |r, th| r + th.sin());
        assert_eq!(PolarField::from_csv(grid, &f.to_csv()).unwrap(), f);
        assert!(PolarField::from_csv(grid, "ring,angle,value\n0,0,1\n").is_err());
    }

    #[test]
    fn deviation_against_caps() {
        let m = build_unit_disk(5).unwrap();
        let half = DesignDensity::indicator(&m, &m.locate_cells_by_predicate(|p| p[0] > 0.0)).unwrap();
        assert!(symmetry_deviation(&m, &half).unwrap() < 0.05);
        let quadrants = DesignDensity::indicator(&m, &m.locate_cells_by_predicate(|p| p[0] * p[1] > 0.0)).unwrap();
        let dev = symmetry_deviation(&m, &quadrants).unwrap();
        assert!((dev - PI / 2.0).abs() < 0.1, "{dev}");
        assert!(symmetry_deviation(&build_unit_square(4).unwrap(), &DesignDensity::zeros(&build_unit_square(4).unwrap())).is_err());
        let ball = DesignDensity::indicator(&m, &m.locate_cells_by_predicate(|p| p[0].hypot(p[1]) < 0.5)).unwrap();
        assert!(symmetry_deviation(&m, &ball).unwrap() < 1e-12);
    }

    #[test]
    fn optimize_edge_volumes() {
        let m = build_unit_square(6).unwrap();
        let y = YoungFunction::power(2.0);
        let opts = SolverOptions::default();
        let outer = OuterOptions::default();
        let free = crate::state::solve_state(&y, &y, &m, 0.0, &DesignDensity::zeros(&m), &opts, None).unwrap();
        let zero = alternate_optimize(&y, &y, &m, 5.0, 0.0, &opts, &outer).unwrap();
        assert!((zero.lambda - free.lambda).abs() < 1e-10 * free.lambda);
        let full = alternate_optimize(&y, &y, &m, 5.0, 1.0, &opts, &outer).unwrap();
        let one = crate::state::solve_state(&y, &y, &m, 5.0, &DesignDensity::uniform(&m, 1.0).unwrap(), &opts, None).unwrap();
        assert!(full.phi.values().iter().all(|v| *v == 1.0));
        assert!((full.lambda - one.lambda).abs() < 1e-9 * one.lambda);
    }
}
