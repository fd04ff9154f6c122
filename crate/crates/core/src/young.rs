//! Young functions and their calculus.
//!
//! A [`YoungFunction`] is a growth law `G(t) = ∫₀ᵗ g` together with a
//! declared exponent window `p⁻ ≤ t g(t) / G(t) ≤ p⁺`. The built-in families
//! carry analytic densities and analytic windows. Everything in this module
//! is a pure function of immutable data, except the memoized
//! [`ConjugateFunction`], which guards its cache with a mutex.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Family tag as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Power,
    PowerLog,
    PowerSum,
}

/// Serializable description of a built-in Young function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungSpec {
    pub family: FamilyTag,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl YoungSpec {
    pub fn build(&self) -> Result<YoungFunction> {
        make_young(self.family, self.p, self.q)
    }
}

type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied law. The density must be given explicitly.
#[derive(Clone)]
pub struct CustomLaw {
    pub name: String,
    pub big: ScalarMap,
    pub density: ScalarMap,
}

#[derive(Clone)]
enum Law {
    Power { p: f64 },
    PowerLog { p: f64 },
    PowerSum { p: f64, q: f64 },
    Custom(CustomLaw),
}

/// An immutable growth law with its declared exponent window.
#[derive(Clone)]
pub struct YoungFunction {
    law: Law,
    p_minus: f64,
    p_plus: f64,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungFunction({}, p-={}, p+={})", self.describe(), self.p_minus, self.p_plus)
    }
}

/// Build one of the built-in families. `q` is only read for `PowerSum`.
pub fn make_young(family: FamilyTag, p: f64, q: Option<f64>) -> Result<YoungFunction> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidYoung(format!("exponent p = {p} must satisfy p > 1")));
    }
    match family {
        FamilyTag::Power => Ok(YoungFunction::power(p)),
        FamilyTag::PowerLog => Ok(YoungFunction { law: Law::PowerLog { p }, p_minus: p, p_plus: p + 1.0 }),
        FamilyTag::PowerSum => {
            let q = q.ok_or_else(|| Error::InvalidYoung("power_sum requires q".into()))?;
            if !q.is_finite() || q <= p {
                return Err(Error::InvalidYoung(format!("power_sum requires 1 < p < q, got p = {p}, q = {q}")));
            }
            Ok(YoungFunction { law: Law::PowerSum { p, q }, p_minus: p, p_plus: q })
        }
    }
}

impl YoungFunction {
    /// `G(t) = t^p`. Panics if `p <= 1`; use [`make_young`] for fallible construction.
    pub fn power(p: f64) -> Self {
        assert!(p > 1.0, "power exponent must exceed 1");
        YoungFunction { law: Law::Power { p }, p_minus: p, p_plus: p }
    }

    pub fn power_log(p: f64) -> Result<Self> {
        make_young(FamilyTag::PowerLog, p, None)
    }

    pub fn power_sum(p: f64, q: f64) -> Result<Self> {
        make_young(FamilyTag::PowerSum, p, Some(q))
    }

    /// A custom law with an explicit density and a declared window. The window
    /// is not verified here; see [`verify_exponent_window`].
    pub fn custom(law: CustomLaw, p_minus: f64, p_plus: f64) -> Result<Self> {
        if !(p_minus > 1.0 && p_plus >= p_minus && p_plus.is_finite()) {
            return Err(Error::InvalidYoung(format!(
                "declared window ({p_minus}, {p_plus}) must satisfy 1 < p- <= p+ < inf"
            )));
        }
        Ok(YoungFunction { law: Law::Custom(law), p_minus, p_plus })
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn family(&self) -> Option<FamilyTag> {
        match self.law {
            Law::Power { .. } => Some(FamilyTag::Power),
            Law::PowerLog { .. } => Some(FamilyTag::PowerLog),
            Law::PowerSum { .. } => Some(FamilyTag::PowerSum),
            Law::Custom(_) => None,
        }
    }

    pub fn spec(&self) -> Option<YoungSpec> {
        match self.law {
            Law::Power { p } => Some(YoungSpec { family: FamilyTag::Power, p, q: None }),
            Law::PowerLog { p } => Some(YoungSpec { family: FamilyTag::PowerLog, p, q: None }),
            Law::PowerSum { p, q } => Some(YoungSpec { family: FamilyTag::PowerSum, p, q: Some(q) }),
            Law::Custom(_) => None,
        }
    }

    /// Exponent `p` if this is a pure power law.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.law {
            Law::Power { p } => Some(p),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.law {
            Law::Power { p } => format!("t^{p}"),
            Law::PowerLog { p } => format!("t^{p} log(1+t)"),
            Law::PowerSum { p, q } => format!("t^{p} + t^{q}"),
            Law::Custom(c) => c.name.clone(),
        }
    }

    /// `G(t)` for `t >= 0`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Power { p } => pow(t, *p),
            Law::PowerLog { p } => pow(t, *p) * t.ln_1p(),
            Law::PowerSum { p, q } => pow(t, *p) + pow(t, *q),
            Law::Custom(c) => (c.big)(t),
        }
    }

    /// The density `g(t) = G'(t)` for `t >= 0`.
    #[inline]
    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Power { p } => p * pow(t, p - 1.0),
            Law::PowerLog { p } => p * pow(t, p - 1.0) * t.ln_1p() + pow(t, *p) / (1.0 + t),
            Law::PowerSum { p, q } => p * pow(t, p - 1.0) + q * pow(t, q - 1.0),
            Law::Custom(c) => (c.density)(t),
        }
    }

    /// `g(m) / m`, the flux/reaction coefficient, with `m` capped below by `eps`.
    #[inline]
    pub fn secant_coefficient(&self, m: f64, eps: f64) -> f64 {
        let m = m.max(eps);
        match self.law {
            Law::Power { p } => p * pow(m, p - 2.0),
            _ => self.density(m) / m,
        }
    }

    /// `t g(t) / G(t)`.
    pub fn ratio(&self, t: f64) -> f64 {
        match &self.law {
            Law::Power { p } => *p,
            Law::PowerLog { p } => p + t / ((1.0 + t) * t.ln_1p()),
            _ => t * self.density(t) / self.eval(t),
        }
    }

    /// `G⁻¹(y)` by bracketed bisection to relative tolerance 1e-15 on the abscissa.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        inverse_g(self, y)
    }
}

#[inline]
fn pow(t: f64, e: f64) -> f64 {
    if e == 2.0 {
        t * t
    } else if e == 1.0 {
        t
    } else if e == 3.0 {
        t * t * t
    } else if e == 4.0 {
        let s = t * t;
        s * s
    } else {
        t.powf(e)
    }
}

/// Outcome of [`verify_exponent_window`].
#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub declared: (f64, f64),
    pub violations: Vec<f64>,
    pub pass: bool,
}

/// Log-spaced grid of `per_decade` points per decade on `[10^lo, 10^hi]`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi - lo) * per_decade as f64).round().max(1.0) as usize;
    (0..=n).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / n as f64)).collect()
}

/// Evaluate `t g(t) / G(t)` over `grid` and compare against the declared window.
pub fn verify_exponent_window(y: &YoungFunction, grid: &[f64]) -> WindowReport {
    const EPS: f64 = 1e-8;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for &t in grid.iter().filter(|t| **t > 0.0) {
        let r = y.ratio(t);
        lo = lo.min(r);
        hi = hi.max(r);
        if !r.is_finite() || r < y.p_minus - EPS || r > y.p_plus + EPS {
            violations.push(t);
        }
    }
    WindowReport {
        min_ratio: lo,
        max_ratio: hi,
        declared: (y.p_minus, y.p_plus),
        pass: violations.is_empty(),
        violations,
    }
}

/// `G⁻¹(y)`; exact zero at `y = 0`.
pub fn inverse_g(g: &YoungFunction, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::InvalidArgument(format!("inverse_G needs y >= 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut guard = 0;
    while g.eval(hi) < y {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::BracketFailure(format!("no upper bracket for G(t) = {y}")));
        }
    }
    while g.eval(lo) > y {
        hi = lo;
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::BracketFailure(format!("no lower bracket for G(t) = {y}")));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g.eval(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solve `g(s) = t` for `s`, with geometric bracket extension.
fn density_inverse(g: &YoungFunction, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while g.density(hi) < t {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::BracketFailure(format!("g(s) = {t} not bracketed after 200 doublings")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..300 {
        if hi - lo <= 1e-16 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g.density(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Complementary function `G̃(t) = sup_s { s t − G(s) }` evaluated at the
/// maximizer `s* = g⁻¹(t)`.
pub fn conjugate(g: &YoungFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("conjugate needs t >= 0, got {t}")));
    }
    let s = density_inverse(g, t)?;
    Ok(s * t - g.eval(s))
}

/// Memoized complementary function. Safe to share across threads.
pub struct ConjugateFunction {
    source: YoungFunction,
    cache: Mutex<HashMap<u64, f64>>,
}

impl ConjugateFunction {
    pub fn new(source: YoungFunction) -> Self {
        ConjugateFunction { source, cache: Mutex::new(HashMap::new()) }
    }

    pub fn source(&self) -> &YoungFunction {
        &self.source
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let key = t.to_bits();
        if let Some(v) = self.cache.lock().expect("conjugate cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = conjugate(&self.source, t)?;
        self.cache.lock().expect("conjugate cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.lock().expect("conjugate cache poisoned").len()
    }
}

/// Result of evaluating the Sobolev critical function.
#[derive(Debug, Clone, Serialize)]
pub struct SobolevConjugate {
    /// `G*⁻¹(t)`.
    pub value: f64,
    /// Local exponent `b` of `s ↦ s · G⁻¹(s) / s^{1+1/n}` near zero; the
    /// integral converges at zero iff `b > 0`.
    pub exponent_at_zero: f64,
    /// Same exponent for large `s`; the integral over `(1, ∞)` diverges iff `b ≥ 0`.
    pub exponent_at_infinity: f64,
    /// Truncations `∫₁^T` for `T = 10, 10², …` used by the divergence heuristic.
    pub tail_truncations: Vec<f64>,
    pub diverges_at_infinity: bool,
}

/// `G*⁻¹(t) = ∫₀ᵗ G⁻¹(s) / s^{(n+1)/n} ds` by adaptive quadrature in `ln s`
/// with an analytic power-law tail below `t·e⁻⁶⁰`.
pub fn sobolev_conjugate_inverse(g: &YoungFunction, n: usize, t: f64) -> Result<SobolevConjugate> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension n = {n} must be >= 2")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t = {t} must be positive")));
    }
    let inv_n = 1.0 / n as f64;
    // integrand in the variable y = ln s: G⁻¹(e^y) e^{-y/n}
    let h = |y: f64| -> f64 { inverse_g(g, y.exp()).map(|v| v * (-y * inv_n).exp()).unwrap_or(f64::NAN) };
    let local_exponent = |y: f64| -> f64 { (h(y + 1.0).ln() - h(y).ln()).max(-1e3) };

    let y_top = t.ln();
    let y_min = y_top - 60.0;
    let b0 = local_exponent(y_min);
    let y_far = 69.0; // s ≈ 1e30
    let b_inf = local_exponent(y_far);

    let mut tails = Vec::new();
    let mut acc = 0.0;
    let mut lo = 0.0;
    for k in 1..=12 {
        let hi = (10f64).ln() * k as f64;
        acc += adaptive_simpson(&h, lo, hi, 1e-12, 40);
        tails.push(acc);
        lo = hi;
    }
    let diverges_at_infinity = b_inf >= -1e-3;

    if b0 < 1e-3 {
        return Err(Error::Cond1Violation { exponent: b0 });
    }
    let body = adaptive_simpson(&h, y_min, y_top, 1e-12 * h(y_top).abs().max(1e-300), 48);
    let tail = h(y_min) / b0;
    Ok(SobolevConjugate {
        value: body + tail,
        exponent_at_zero: b0,
        exponent_at_infinity: b_inf,
        tail_truncations: tails,
        diverges_at_infinity,
    })
}

/// Find `s > 0` with `modular(s) = 1`, where `modular(s) = Φ(s·u)` is
/// monotone in `s` and `at_one = Φ(u) > 0`. The bracket comes from
/// `min{s^{p⁻}, s^{p⁺}} Φ(u) ≤ Φ(s u) ≤ max{s^{p⁻}, s^{p⁺}} Φ(u)`.
pub fn unit_level_scaling<F: FnMut(f64) -> f64>(mut modular: F, at_one: f64, p_minus: f64, p_plus: f64, rel_tol: f64) -> Result<f64> {
    if !(at_one > 0.0) || !at_one.is_finite() {
        return Err(Error::NotProjectable);
    }
    if at_one == 1.0 {
        return Ok(1.0);
    }
    let a = at_one.powf(-1.0 / p_minus);
    let b = at_one.powf(-1.0 / p_plus);
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    // widen slightly against roundoff in the bounds
    lo *= 1.0 - 1e-12;
    hi *= 1.0 + 1e-12;
    if lo == hi {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = modular(mid);
        if (v - 1.0).abs() <= 0.25 * rel_tol {
            return Ok(mid);
        }
        if v < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Luxemburg norm `inf{λ > 0 : Φ(u/λ) ≤ 1}` given `scaled(s) = Φ(s·u)`.
pub fn luxemburg_norm<F: Fn(f64) -> f64>(scaled: F, p_minus: f64, p_plus: f64) -> f64 {
    let at_one = scaled(1.0);
    if at_one == 0.0 {
        return 0.0;
    }
    match unit_level_scaling(&scaled, at_one, p_minus, p_plus, 1e-12) {
        Ok(s) => 1.0 / s,
        Err(_) => f64::NAN,
    }
}

/// Heuristic check that `h` grows more slowly than `g`: `H(t) / G(λt)` is
/// decreasing over a large-`t` grid for `λ ∈ {0.5, 1, 2}`.
pub fn grows_more_slowly(h: &YoungFunction, g: &YoungFunction) -> bool {
    let grid = log_grid(1.0, 8.0, 4);
    [0.5, 1.0, 2.0].iter().all(|&lam| {
        let ratios: Vec<f64> = grid.iter().map(|&t| h.eval(t) / g.eval(lam * t)).collect();
        ratios.windows(2).all(|w| w[1] < w[0]) && ratios.last().copied().unwrap_or(1.0) < ratios[0]
    })
}

/// Outcome of one sampled property.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    /// Largest relative violation seen (negative when every sample held with room).
    pub worst: f64,
}

impl PropertyCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Sampled checks of the growth-law axioms for one Young function.
#[derive(Debug, Clone, Serialize)]
pub struct YoungSuiteReport {
    pub law: String,
    pub p_minus: f64,
    pub p_plus: f64,
    pub window: WindowReport,
    pub checks: Vec<PropertyCheck>,
}

impl YoungSuiteReport {
    pub fn passed(&self) -> bool {
        self.window.pass && self.checks.iter().all(PropertyCheck::passed)
    }
}

struct Tally {
    check: PropertyCheck,
    tol: f64,
}

impl Tally {
    fn new(name: &'static str, tol: f64) -> Self {
        Tally { check: PropertyCheck { name, samples: 0, failures: 0, worst: f64::NEG_INFINITY }, tol }
    }

    /// Records `lhs ≤ rhs` relative to `scale`.
    fn le(&mut self, lhs: f64, rhs: f64, scale: f64) {
        let v = (lhs - rhs) / scale.abs().max(f64::MIN_POSITIVE);
        self.push(v);
    }

    fn close(&mut self, a: f64, b: f64, scale: f64) {
        let v = (a - b).abs() / scale.abs().max(f64::MIN_POSITIVE);
        self.push(v);
    }

    fn push(&mut self, v: f64) {
        self.check.samples += 1;
        self.check.worst = self.check.worst.max(v);
        if !(v <= self.tol) {
            self.check.failures += 1;
        }
    }
}

/// Checks the exponent window, the scaling sandwich, the quasi-triangle
/// bound `G(a+b) ≤ 2^{p⁺}(G(a)+G(b))`, Young's inequality with its equality
/// case, the inverse round trip and convexity on `samples` random draws each.
pub fn young_suite<R: rand::Rng>(y: &YoungFunction, samples: usize, rng: &mut R) -> Result<YoungSuiteReport> {
    let (pm, pp) = (y.p_minus(), y.p_plus());
    let window = verify_exponent_window(y, &log_grid(-6.0, 6.0, 20));
    let mut scaling = Tally::new("scaling sandwich", 1e-8);
    let mut triangle = Tally::new("quasi-triangle", 1e-8);
    let mut young_ineq = Tally::new("young inequality", 1e-8);
    let mut young_eq = Tally::new("young equality", 1e-8);
    let mut round_trip = Tally::new("inverse round trip", 1e-10);
    let mut convex = Tally::new("convexity", 1e-12);
    let conj = ConjugateFunction::new(y.clone());
    for _ in 0..samples {
        let a: f64 = rng.gen_range(1e-6..10.0);
        let b: f64 = rng.gen_range(1e-6..10.0);
        let gab = y.eval(a * b);
        let gb = y.eval(b);
        scaling.le(a.powf(pm).min(a.powf(pp)) * gb, gab, gab);
        scaling.le(gab, a.powf(pm).max(a.powf(pp)) * gb, gab);
        let bound = 2f64.powf(pp) * (y.eval(a) + gb);
        triangle.le(y.eval(a + b), bound, bound);

        let s: f64 = rng.gen_range(1e-3..10.0);
        let t: f64 = rng.gen_range(1e-3..y.density(10.0));
        let rhs = y.eval(s) + conj.eval(t)?;
        young_ineq.le(s * t, rhs, rhs);
        let gs = y.density(s);
        let both = y.eval(s) + conj.eval(gs)?;
        young_eq.close(s * gs, both, both);

        let r = 10f64.powf(rng.gen_range(-3.0..3.0));
        round_trip.close(inverse_g(y, y.eval(r))?, r, r);

        let (mut t1, mut t2): (f64, f64) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        let th: f64 = rng.gen_range(0.0..1.0);
        let chord = th * y.eval(t1) + (1.0 - th) * y.eval(t2);
        convex.le(y.eval(th * t1 + (1.0 - th) * t2), chord, chord.max(1.0));
    }
    Ok(YoungSuiteReport {
        law: y.describe(),
        p_minus: pm,
        p_plus: pp,
        window,
        checks: [scaling, triangle, young_ineq, young_eq, round_trip, convex].into_iter().map(|t| t.check).collect(),
    })
}
