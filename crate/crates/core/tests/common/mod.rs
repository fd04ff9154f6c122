//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use rand::Rng;
use steklov_core::design::{PolarField, PolarGrid};

/// `I₁(1) / I₀(1)` from the power series.
pub fn bessel_ratio_series() -> f64 {
    let (mut i0, mut i1) = (0.0, 0.0);
    let mut fk = 1.0;
    for k in 0..30 {
        if k > 0 {
            fk *= k as f64;
        }
        let q = 0.25f64.powi(k);
        i0 += q / (fk * fk);
        i1 += 0.5 * q / (fk * fk * (k as f64 + 1.0));
    }
    i1 / i0
}

/// RK4 for `u'' + u'/r = k(r) u` on `[a, b]` with `k` constant on the interval.
fn rk4_segment(k: f64, a: f64, b: f64, mut u: f64, mut v: f64, steps: usize) -> (f64, f64) {
    let h = (b - a) / steps as f64;
    let f = |r: f64, u: f64, v: f64| (v, k * u - v / r);
    let mut r = a;
    for _ in 0..steps {
        let (k1u, k1v) = f(r, u, v);
        let (k2u, k2v) = f(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = f(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = f(r + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
    }
    (u, v)
}

/// Steklov value `u'(1)/u(1)` for `−Δu + (1 + α χ_{r<r0}) u = 0` on the unit
/// disk with quadratic growth, by shooting from the regular centre.
pub fn radial_ball_design(alpha: f64, r0: f64) -> f64 {
    let k_in = 1.0 + alpha;
    let r_start = 1e-6;
    // series start: u = 1 + k r²/4
    let first_k = if r0 > r_start { k_in } else { 1.0 };
    let (u, v) = (1.0 + first_k * r_start * r_start / 4.0, first_k * r_start / 2.0);
    let (u, v) = if r0 > r_start {
        let (u, v) = rk4_segment(k_in, r_start, r0.min(1.0), u, v, 40_000);
        if r0 < 1.0 {
            rk4_segment(1.0, r0, 1.0, u, v, 40_000)
        } else {
            (u, v)
        }
    } else {
        rk4_segment(1.0, r_start, 1.0, u, v, 40_000)
    };
    v / u
}

/// `α = 0` Steklov value on the unit disk.
pub fn radial_free() -> f64 {
    radial_ball_design(0.0, 0.0)
}

/// Steklov value with a centred Dirichlet hole of radius `r0`.
pub fn radial_hole(r0: f64) -> f64 {
    let (u, v) = rk4_segment(1.0, r0, 1.0, 0.0, 1.0, 80_000);
    v / u
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Minimum of `Σ φ_T m_T` over densities with at most one fractional cell
/// and `Σ φ_T a_T = c`, by enumerating every full-cell subset.
pub fn brute_force_weighted_min(areas: &[f64], modulars: &[f64], c: f64) -> f64 {
    let n = areas.len();
    assert!(n <= 20);
    let tol = 1e-13;
    let max_area = areas.iter().cloned().fold(0.0, f64::max);
    let size = 1usize << n;
    let mut vol = vec![0.0; size];
    let mut val = vec![0.0; size];
    let mut best = f64::INFINITY;
    for mask in 0..size {
        if mask > 0 {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            vol[mask] = vol[rest] + areas[low];
            val[mask] = val[rest] + modulars[low];
        }
        let rest = c - vol[mask];
        if rest.abs() <= tol {
            best = best.min(val[mask]);
            continue;
        }
        if rest < 0.0 || rest > max_area + tol {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 && rest <= areas[j] + tol {
                best = best.min(val[mask] + rest / areas[j] * modulars[j]);
            }
        }
    }
    best
}

/// Positive smooth polar field `exp(Σ a rᵐ cos(mθ + b) cos(k r))` with five random modes.
pub fn random_polar<R: Rng>(grid: PolarGrid, rng: &mut R) -> PolarField {
    let modes: Vec<(f64, i32, f64, f64)> =
        (0..5).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0..4), rng.gen_range(0.0..6.3), rng.gen_range(0.5..3.0))).collect();
    PolarField::from_fn(grid, |r, th| {
        let s: f64 = modes.iter().map(|(a, m, b, k)| a * r.powi(*m) * (*m as f64 * th + b).cos() * (k * r).cos()).sum();
        s.exp()
    })
}
