//! Behaviour of `Λ(α, c)` as `α → ∞` and the hole problem
//! `λ(∞, c) = inf { λ(∞, E) : |E| = c }`, where `λ(∞, E)` is the `α = 0`
//! value with `u = 0` on `E`.
//!
//! Holes are whole-cell sets. A P1 field vanishing on a fractional cell
//! vanishes on its closure, so the finite-`α` problem with fractional density
//! converges to the whole-cell hole problem as `α` grows.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::design::{bathtub_cells, cap_starts, cell_levels, lowest, optimize_from, optimize_with, OptimalPair, OuterOptions};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::modular::{sobolev_modular, weighted_modular, DesignDensity, NodalField};
use crate::state::{hole_vertex_mask, EigenPair, SolveStatus, SolverOptions, StateSolver};
use crate::young::YoungFunction;

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - s * dx).hypot(p[1] - a[1] - s * dy)
}

/// Distance from each cell barycentre to the boundary polygon.
pub fn boundary_distance(mesh: &Mesh) -> Vec<f64> {
    let x = mesh.vertices();
    (0..mesh.n_cells())
        .map(|c| {
            let b = mesh.barycenter(c);
            mesh.boundary_edges().iter().map(|e| segment_distance(b, x[e[0]], x[e[1]])).fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Cells all of whose vertices are pinned by the closure of `cells`.
pub fn saturate_hole(mesh: &Mesh, cells: &[usize]) -> Result<Vec<usize>> {
    let pinned = hole_vertex_mask(mesh, cells)?;
    Ok((0..mesh.n_cells()).filter(|&c| mesh.cells()[c].iter().all(|&v| pinned[v])).collect())
}

fn area_of(mesh: &Mesh, cells: &[usize]) -> f64 {
    cells.iter().map(|&c| mesh.cell_areas()[c]).sum()
}

/// One concrete upper bound for `Λ(α, c)` uniform in `α`.
#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub k: f64,
    /// Hole `D₀` used for the bound.
    pub hole: Vec<usize>,
    pub hole_area: f64,
}

/// `K = I_{α=0}(u₀)` with `u₀` the hole state on `D₀`, the deepest cells
/// (by distance to the boundary) of total area at least `c`.
pub fn upper_bound_k(young: &YoungFunction, boundary: &YoungFunction, mesh: &Mesh, c: f64, opts: &SolverOptions) -> Result<UpperBound> {
    let solver = StateSolver::new(young, boundary, mesh, opts.clone())?;
    upper_bound_with(&solver, c)
}

fn upper_bound_with(solver: &StateSolver, c: f64) -> Result<UpperBound> {
    let mesh = solver.mesh();
    let total = mesh.total_area();
    let infinite = || UpperBound { k: f64::INFINITY, hole: (0..mesh.n_cells()).collect(), hole_area: total };
    if c >= total * (1.0 - 1e-13) {
        return Ok(infinite());
    }
    let depth: Vec<f64> = boundary_distance(mesh).iter().map(|d| -d).collect();
    let (hole, _) = bathtub_cells(mesh, &depth, c)?;
    let hole = match saturate_hole(mesh, &hole) {
        Ok(h) => h,
        Err(Error::NotProjectable) => return Ok(infinite()),
        Err(e) => return Err(e),
    };
    let pair = solver.solve_hole(&hole, None)?;
    if pair.status != SolveStatus::Converged {
        return Err(Error::NonConvergence(format!("bound hole solve {:?}", pair.status)));
    }
    Ok(UpperBound { k: pair.lambda, hole_area: area_of(mesh, &hole), hole })
}

#[derive(Debug, Clone)]
pub struct LimitOptions {
    pub max_iterations: usize,
    /// Starting hole. Without one, both the free-state bathtub and the
    /// deepest-cells hole are tried and the lower value is kept.
    pub initial_hole: Option<Vec<usize>>,
    pub u0: Option<Vec<f64>>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { max_iterations: 50, initial_hole: None, u0: None }
    }
}

/// Output of [`solve_limit`].
#[derive(Debug, Clone, Serialize)]
pub struct LimitPair {
    pub u: NodalField,
    /// Sorted hole cells; every cell with all vertices pinned is included.
    pub hole: Vec<usize>,
    pub lambda: f64,
    pub c: f64,
    pub hole_area: f64,
    /// `|E| − c`.
    pub volume_mismatch: f64,
    /// Area of cells on which `u` vanishes at every vertex.
    pub zero_set_area: f64,
    /// `min u / max u` over free vertices.
    pub min_free_ratio: f64,
    pub history: Vec<f64>,
    pub state: EigenPair,
}

impl LimitPair {
    pub fn indicator(&self, mesh: &Mesh) -> Result<DesignDensity> {
        DesignDensity::indicator(mesh, &self.hole)
    }

    /// Strict positivity away from the hole and `|{u = 0}| = |E|`.
    pub fn invariants_hold(&self) -> bool {
        self.min_free_ratio > 1e-8 && self.zero_set_area == self.hole_area
    }
}

/// Alternate hole solves with the whole-cell bathtub of the hole state.
pub fn solve_limit(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    c: f64,
    opts: &SolverOptions,
    limit: &LimitOptions,
) -> Result<LimitPair> {
    let solver = StateSolver::new(young, boundary, mesh, opts.clone())?;
    solve_limit_with(&solver, c, limit)
}

pub fn solve_limit_with(solver: &StateSolver, c: f64, limit: &LimitOptions) -> Result<LimitPair> {
    let mesh = solver.mesh();
    let young = solver.young();
    if !(c >= 0.0 && c < mesh.total_area()) {
        return Err(Error::InvalidArgument(format!("limit volume c = {c} outside [0, |Ω|)")));
    }
    let max_iter = limit.max_iterations.max(1);
    if let Some(h) = &limit.initial_hole {
        return settle(solver, c, saturate_hole(mesh, h)?, limit.u0.clone(), max_iter);
    }
    let free = solver.solve(0.0, &DesignDensity::zeros(mesh), None)?;
    let (h, _) = bathtub_cells(mesh, &cell_levels(young, mesh, &free.u), c)?;
    let mut starts = vec![(h, Some(free.u.into_inner()))];
    let depth: Vec<f64> = boundary_distance(mesh).iter().map(|d| -d).collect();
    starts.push((bathtub_cells(mesh, &depth, c)?.0, limit.u0.clone()));
    for keys in cap_starts(mesh) {
        starts.push((bathtub_cells(mesh, &keys, c)?.0, None));
    }
    lowest(starts.into_iter().map(|(h, u0)| settle(solver, c, saturate_hole(mesh, &h)?, u0, max_iter)), |l| l.lambda)
}

fn settle(solver: &StateSolver, c: f64, mut hole: Vec<usize>, mut u0: Option<Vec<f64>>, max_iter: usize) -> Result<LimitPair> {
    let mesh = solver.mesh();
    let young = solver.young();
    let mut history = Vec::new();
    for _ in 0..max_iter {
        let pair = solver.solve_hole(&hole, u0.as_deref())?;
        if pair.status != SolveStatus::Converged {
            return Err(Error::NonConvergence(format!("hole solve {:?} after {} iterations", pair.status, pair.iterations)));
        }
        history.push(pair.lambda);
        let (next, _) = bathtub_cells(mesh, &cell_levels(young, mesh, &pair.u), c)?;
        let next = saturate_hole(mesh, &next)?;
        if next == hole {
            return Ok(finish_limit(mesh, c, hole, pair, history));
        }
        u0 = Some(pair.u.into_inner());
        hole = next;
    }
    Err(Error::NonConvergence(format!("hole set did not settle in {max_iter} iterations")))
}

fn finish_limit(mesh: &Mesh, c: f64, hole: Vec<usize>, pair: EigenPair, history: Vec<f64>) -> LimitPair {
    let pinned = hole_vertex_mask(mesh, &hole).unwrap_or_else(|_| vec![false; mesh.n_vertices()]);
    let u = &pair.u;
    let max = u.iter().cloned().fold(0.0, f64::max);
    let min_free = u.iter().zip(&pinned).filter(|(_, p)| !**p).map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
    let zero_cells: Vec<usize> = (0..mesh.n_cells()).filter(|&c| mesh.cells()[c].iter().all(|&v| u[v] == 0.0)).collect();
    let hole_area = area_of(mesh, &hole);
    LimitPair {
        u: pair.u.clone(),
        lambda: pair.lambda,
        c,
        hole_area,
        volume_mismatch: hole_area - c,
        zero_set_area: area_of(mesh, &zero_cells),
        min_free_ratio: if max > 0.0 { min_free / max } else { 0.0 },
        hole,
        history,
        state: pair,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub lambda: f64,
    /// `Φ_{G,φ_α}(u_α)`.
    pub weighted: f64,
    pub alpha_weighted: f64,
    /// `Λ(α, c) − λ(∞, c)`.
    pub hole_gap: f64,
    /// `∫ |φ_α − χ_{D∞}|`.
    pub indicator_gap: f64,
    /// `Φ_{1,G}(u_α − u_∞)`.
    pub modular_distance: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepChecks {
    pub lambda_nondecreasing: bool,
    pub below_k: bool,
    pub alpha_weighted_below_k: bool,
    pub weighted_below_k_over_alpha: bool,
    pub hole_gap_shrinking: bool,
    /// Modular distance decreasing over the last three entries.
    pub modular_distance_tail_decreasing: bool,
    pub indicator_gap_nonincreasing: bool,
}

impl SweepChecks {
    pub fn all(&self) -> bool {
        self.lambda_nondecreasing
            && self.below_k
            && self.alpha_weighted_below_k
            && self.weighted_below_k_over_alpha
            && self.hole_gap_shrinking
            && self.modular_distance_tail_decreasing
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub c: f64,
    pub k: UpperBound,
    pub records: Vec<SweepRecord>,
    pub limit: LimitPair,
    /// `λ(∞, c)` from the default (free-state) start.
    pub cold_start_lambda: f64,
    pub checks: SweepChecks,
    #[serde(skip)]
    pub pairs: Vec<OptimalPair>,
}

impl SweepReport {
    /// CSV `alpha,lambda,weighted,alpha_weighted,hole_gap,indicator_gap`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,lambda,weighted,alpha_weighted,hole_gap,indicator_gap\n");
        for r in &self.records {
            let _ = writeln!(s, "{},{},{},{},{},{}", r.alpha, r.lambda, r.weighted, r.alpha_weighted, r.hole_gap, r.indicator_gap);
        }
        s
    }
}

/// Rows of a sweep CSV: `(alpha, lambda, weighted, alpha_weighted, hole_gap, indicator_gap)`.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<[f64; 6]>> {
    let mut lines = text.lines();
    if lines.next() != Some("alpha,lambda,weighted,alpha_weighted,hole_gap,indicator_gap") {
        return Err(Error::Parse { line: 1, msg: "unexpected sweep header".into() });
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(no, l)| {
            let v: Vec<f64> = l.split(',').map(|f| f.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| Error::Parse { line: no + 2, msg: format!("bad number in `{l}`") })?;
            v.try_into().map_err(|_| Error::Parse { line: no + 2, msg: "expected six fields".into() })
        })
        .collect()
}

/// Warm-started sweep of `Λ(α, c)` over increasing `alphas`.
pub fn sweep_alpha(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    c: f64,
    alphas: &[f64],
    opts: &SolverOptions,
    outer: &OuterOptions,
) -> Result<SweepReport> {
    if alphas.is_empty() || alphas.windows(2).any(|w| !(w[1] > w[0])) || !(alphas[0] >= 0.0) {
        return Err(Error::InvalidArgument("alphas must be nonnegative and strictly increasing".into()));
    }
    let solver = StateSolver::new(young, boundary, mesh, opts.clone())?;
    let k = upper_bound_with(&solver, c)?;

    let mut pairs: Vec<OptimalPair> = Vec::new();
    let mut flags = Vec::new();
    for &alpha in alphas {
        let cold = optimize_with(&solver, alpha, c, outer);
        let run = match pairs.last() {
            None => cold,
            Some(prev) => lowest([optimize_from(&solver, alpha, c, outer, prev.phi.clone(), Some(prev.u.to_vec())), cold], |p| p.lambda),
        };
        match run {
            Ok(p) => {
                pairs.push(p);
                flags.push(true);
            }
            Err(Error::NonConvergence(_)) => flags.push(false),
            Err(e) => return Err(e),
        }
    }
    let last = pairs.last().ok_or_else(|| Error::NonConvergence("no sweep entry converged".into()))?;

    let (seed_hole, _) = bathtub_cells(mesh, &cell_levels(young, mesh, &last.u), c)?;
    let warm = solve_limit_with(
        &solver,
        c,
        &LimitOptions { max_iterations: 50, initial_hole: Some(seed_hole), u0: Some(last.u.to_vec()) },
    )?;
    let cold = solve_limit_with(&solver, c, &LimitOptions { max_iterations: 50, ..Default::default() })?;
    let cold_lambda = cold.lambda;
    let limit = lowest([Ok(warm), Ok(cold)], |l: &LimitPair| l.lambda)?;
    let chi = limit.indicator(mesh)?;

    let mut records = Vec::new();
    let mut pi = pairs.iter();
    for (&alpha, &ok) in alphas.iter().zip(&flags) {
        if !ok {
            records.push(SweepRecord {
                alpha,
                lambda: f64::NAN,
                weighted: f64::NAN,
                alpha_weighted: f64::NAN,
                hole_gap: f64::NAN,
                indicator_gap: f64::NAN,
                modular_distance: f64::NAN,
                converged: false,
            });
            continue;
        }
        let p = pi.next().expect("one pair per converged entry");
        let weighted = weighted_modular(young, mesh, &p.phi, &p.u);
        let diff: Vec<f64> = p.u.iter().zip(limit.u.iter()).map(|(a, b)| a - b).collect();
        records.push(SweepRecord {
            alpha,
            lambda: p.lambda,
            weighted,
            alpha_weighted: alpha * weighted,
            hole_gap: p.lambda - limit.lambda,
            indicator_gap: p.phi.values().iter().zip(chi.values()).zip(mesh.cell_areas()).map(|((a, b), w)| (a - b).abs() * w).sum(),
            modular_distance: sobolev_modular(young, mesh, &diff),
            converged: true,
        });
    }
    let checks = sweep_checks(&records, k.k);
    Ok(SweepReport { c, k, records, cold_start_lambda: cold_lambda, limit, checks, pairs })
}

fn sweep_checks(records: &[SweepRecord], k: f64) -> SweepChecks {
    let ok: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    let pairs = || ok.windows(2);
    let tail: Vec<f64> = ok.iter().rev().take(3).rev().map(|r| r.modular_distance).collect();
    SweepChecks {
        lambda_nondecreasing: pairs().all(|w| w[1].lambda >= w[0].lambda * (1.0 - 1e-10)),
        below_k: ok.iter().all(|r| r.lambda <= k * (1.0 + 1e-9)),
        alpha_weighted_below_k: ok.iter().all(|r| r.alpha_weighted <= k * (1.0 + 1e-6)),
        weighted_below_k_over_alpha: ok.iter().filter(|r| r.alpha > 0.0).all(|r| r.weighted <= k / r.alpha * (1.0 + 1e-6)),
        hole_gap_shrinking: pairs().all(|w| w[1].hole_gap.abs() <= w[0].hole_gap.abs()),
        modular_distance_tail_decreasing: tail.windows(2).all(|w| w[1] < w[0]),
        indicator_gap_nonincreasing: pairs().all(|w| w[1].indicator_gap <= w[0].indicator_gap + 1e-12),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeEntry {
    pub c: f64,
    pub lambda: f64,
    pub hole_area: f64,
    pub invariants_hold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledHole {
    pub c: f64,
    pub hole_area: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub entries: Vec<VolumeEntry>,
    /// Smallest `(λ_{i+1} − λ_i) / λ_i`.
    pub min_relative_margin: f64,
    pub strictly_increasing: bool,
    pub samples: Vec<SampledHole>,
    /// Every sampled `|E| > c` satisfies `λ(∞, E) ≥ λ(∞, c) − 10⁻⁸`.
    pub samples_dominated: bool,
}

/// Random smooth cell field `Σ a_k cos(ω_k·x + β_k)` on barycentres.
pub fn random_smooth_keys<R: Rng>(mesh: &Mesh, rng: &mut R) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0), rng.gen_range(0.0..6.3)))
        .collect();
    (0..mesh.n_cells())
        .map(|c| {
            let b = mesh.barycenter(c);
            modes.iter().map(|(a, wx, wy, ph)| a * (wx * b[0] + wy * b[1] + ph).cos()).sum()
        })
        .collect()
}

/// `λ(∞, c)` over an increasing volume grid, plus randomly sampled larger
/// holes that must not beat the optimum.
pub fn monotonicity_in_c(
    young: &YoungFunction,
    boundary: &YoungFunction,
    mesh: &Mesh,
    c_grid: &[f64],
    opts: &SolverOptions,
    samples_per_c: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    let total = mesh.total_area();
    if c_grid.is_empty() || c_grid.iter().any(|c| !(*c > 0.0 && *c < total)) || c_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("volume grid must be strictly increasing inside (0, |Ω|)".into()));
    }
    let solver = StateSolver::new(young, boundary, mesh, opts.clone())?;
    let limits: Vec<LimitPair> = c_grid
        .par_iter()
        .map(|&c| solve_limit_with(&solver, c, &LimitOptions { max_iterations: 50, ..Default::default() }))
        .collect::<Result<_>>()?;
    // a larger optimal hole, trimmed to the smaller volume, is a candidate too
    let mut limits = limits;
    for i in (0..limits.len().saturating_sub(1)).rev() {
        let (h, _) = bathtub_cells(mesh, &cell_levels(young, mesh, &limits[i + 1].u), c_grid[i])?;
        let trimmed = LimitOptions { max_iterations: 50, initial_hole: Some(h), u0: Some(limits[i + 1].u.to_vec()) };
        if let Ok(t) = solve_limit_with(&solver, c_grid[i], &trimmed) {
            if t.lambda < limits[i].lambda * (1.0 - 1e-9) {
                limits[i] = t;
            }
        }
    }
    let entries: Vec<VolumeEntry> = limits
        .iter()
        .map(|l| VolumeEntry { c: l.c, lambda: l.lambda, hole_area: l.hole_area, invariants_hold: l.invariants_hold() })
        .collect();
    let min_relative_margin =
        entries.windows(2).map(|w| (w[1].lambda - w[0].lambda) / w[0].lambda).fold(f64::INFINITY, f64::min);

    let jobs: Vec<(usize, u64)> = (0..c_grid.len()).flat_map(|i| (0..samples_per_c as u64).map(move |s| (i, s))).collect();
    let samples: Vec<SampledHole> = jobs
        .par_iter()
        .map(|&(i, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64) << 32) ^ s);
            let c = c_grid[i];
            loop {
                let target = rng.gen_range(c..(c + 0.25 * total).min(0.95 * total));
                let (cells, _) = bathtub_cells(mesh, &random_smooth_keys(mesh, &mut rng), target)?;
                let hole = match saturate_hole(mesh, &cells) {
                    Ok(h) => h,
                    Err(Error::NotProjectable) => continue,
                    Err(e) => return Err(e),
                };
                let pair = solver.solve_hole(&hole, None)?;
                if pair.status == SolveStatus::Converged {
                    return Ok(SampledHole { c, hole_area: area_of(mesh, &hole), lambda: pair.lambda });
                }
            }
        })
        .collect::<Result<_>>()?;
    let samples_dominated = samples.iter().all(|s| {
        let best = entries.iter().find(|e| e.c == s.c).map(|e| e.lambda).unwrap_or(f64::NAN);
        s.lambda >= best - 1e-8
    });
    Ok(MonotonicityReport {
        strictly_increasing: min_relative_margin > 1e-6,
        min_relative_margin,
        entries,
        samples,
        samples_dominated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_unit_disk, build_unit_square};

    #[test]
    fn bound_edge_cases() {
        let m = build_unit_square(6).unwrap();
        let y = YoungFunction::power(2.0);
        let opts = SolverOptions::default();
        let free = crate::state::solve_state(&y, &y, &m, 0.0, &DesignDensity::zeros(&m), &opts, None).unwrap();
        let k0 = upper_bound_k(&y, &y, &m, 0.0, &opts).unwrap();
        assert!((k0.k - free.lambda).abs() < 1e-12 * free.lambda);
        assert_eq!(upper_bound_k(&y, &y, &m, 1.0, &opts).unwrap().k, f64::INFINITY);
        let k = upper_bound_k(&y, &y, &m, 0.2, &opts).unwrap();
        assert!(k.hole_area >= 0.2 && k.k > free.lambda);
    }

    #[test]
    fn distance_to_square_boundary() {
        let m = build_unit_square(4).unwrap();
        for (c, d) in boundary_distance(&m).iter().enumerate() {
            let b = m.barycenter(c);
            let want = b[0].min(1.0 - b[0]).min(b[1]).min(1.0 - b[1]);
            assert!((d - want).abs() < 1e-14);
        }
    }

    #[test]
    fn limit_zero_volume_is_free_problem() {
        let m = build_unit_disk(3).unwrap();
        let y = YoungFunction::power(2.0);
        let opts = SolverOptions::default();
        let free = crate::state::solve_state(&y, &y, &m, 0.0, &DesignDensity::zeros(&m), &opts, None).unwrap();
        let lim = solve_limit(&y, &y, &m, 0.0, &opts, &LimitOptions::default()).unwrap();
        assert!((lim.lambda - free.lambda).abs() < 1e-12 * free.lambda);
        assert!(lim.hole.is_empty() && lim.invariants_hold());
        assert!(solve_limit(&y, &y, &m, m.total_area(), &opts, &LimitOptions::default()).is_err());
    }

    #[test]
    fn sweep_csv_round_trip() {
        let text = "alpha,lambda,weighted,alpha_weighted,hole_gap,indicator_gap\n1,2,3,4,5,6\n";
        assert_eq!(parse_sweep_csv(text).unwrap(), vec![[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]]);
        assert!(parse_sweep_csv("alpha\n").is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let m = build_unit_square(3).unwrap();
        let y = YoungFunction::power(2.0);
        let opts = SolverOptions::default();
        let outer = OuterOptions::default();
        assert!(sweep_alpha(&y, &y, &m, 0.2, &[10.0, 1.0], &opts, &outer).is_err());
        assert!(monotonicity_in_c(&y, &y, &m, &[0.3, 0.2], &opts, 1, 0).is_err());
        assert!(monotonicity_in_c(&y, &y, &m, &[0.0, 0.2], &opts, 1, 0).is_err());
    }
}
