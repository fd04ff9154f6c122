use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use steklov_core::design::*;
use steklov_core::limits::{monotonicity_in_c, solve_limit, sweep_alpha, upper_bound_k, LimitOptions};
use steklov_core::mesh::{Domain, Mesh};
use steklov_core::modular::NodalField;
use steklov_core::state::{solve_state, EigenPair};
use steklov_core::young::{sobolev_conjugate_inverse, young_suite, YoungFunction};

use crate::config::{DensitySpec, Resolved, RunConfig};
use crate::error::CliError;

/// Files produced by one command.
pub struct Output {
    dir: PathBuf,
    quiet: bool,
}

impl Output {
    pub fn new(dir: PathBuf, quiet: bool) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output { dir, quiet })
    }

    fn csv(&self, name: &str, body: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(name), body)?;
        Ok(())
    }

    fn summary(&self, command: &str, config: &RunConfig, results: Value) -> Result<(), CliError> {
        let stamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let doc = json!({
            "command": command,
            "config": config,
            "results": results,
            "timestamp": stamp,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
        fs::write(self.dir.join("summary.json"), text + "\n")?;
        if !self.quiet {
            println!("{command}: wrote {}", self.dir.join("summary.json").display());
        }
        Ok(())
    }
}

fn single_alpha(config: &RunConfig) -> Result<f64, CliError> {
    match config.alpha.values().as_slice() {
        [a] => Ok(*a),
        other => Err(CliError::Config(format!("this command takes one alpha, got {}", other.len()))),
    }
}

fn pair_json(p: &EigenPair) -> Value {
    json!({
        "lambda": p.lambda,
        "el_residual": p.el_residual,
        "multiplier": p.multiplier,
        "multiplier_residual": p.multiplier_residual,
        "iterations": p.iterations,
        "status": format!("{:?}", p.status),
    })
}

fn outer_csv(history: &[f64]) -> String {
    let mut s = String::from("outer,lambda\n");
    for (k, l) in history.iter().enumerate() {
        let _ = writeln!(s, "{k},{l}");
    }
    s
}

pub fn young_check(config: &RunConfig, out: &Output) -> Result<(), CliError> {
    let (young, boundary) = config.laws()?;
    let mut laws = vec![young.clone()];
    if config.boundary_young.is_some() {
        laws.push(boundary);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut reports = Vec::new();
    let mut csv = String::from("law,property,samples,failures,worst\n");
    let mut all = true;
    for y in &laws {
        let rep = young_suite(y, config.samples, &mut rng)?;
        all &= rep.passed();
        for c in &rep.checks {
            let _ = writeln!(csv, "{},{},{},{},{}", rep.law, c.name, c.samples, c.failures, c.worst);
        }
        let cond1 = match sobolev_conjugate_inverse(y, 2, 1.0) {
            Ok(s) => json!({ "integrable_at_zero": true, "value_at_one": s.value, "exponent_at_zero": s.exponent_at_zero, "diverges_at_infinity": s.diverges_at_infinity }),
            Err(steklov_core::Error::Cond1Violation { exponent }) => json!({ "integrable_at_zero": false, "exponent_at_zero": exponent }),
            Err(e) => return Err(e.into()),
        };
        reports.push(json!({ "report": rep, "passed": rep.passed(), "cond1": cond1 }));
    }
    out.csv("young_check.csv", &csv)?;
    out.summary("young-check", config, json!({ "laws": reports, "passed": all }))?;
    if all {
        Ok(())
    } else {
        Err(CliError::Invariant("Young-function property suite failed".into()))
    }
}

pub fn solve(r: &Resolved, out: &Output) -> Result<(), CliError> {
    let alpha = single_alpha(&r.config)?;
    let phi = r.config.density.clone().unwrap_or(DensitySpec::Uniform).build(&r.mesh, r.config.c)?;
    let pair = solve_state(&r.young, &r.boundary, &r.mesh, alpha, &phi, &r.config.solver, None)?;
    out.csv("state.csv", &pair.u.to_csv())?;
    out.csv("density.csv", &phi.to_csv())?;
    out.csv("history.csv", &pair.history_csv())?;
    out.summary("solve", &r.config, json!({ "state": pair_json(&pair), "volume": phi.volume(), "alpha": alpha }))?;
    if pair.converged() {
        Ok(())
    } else {
        Err(CliError::NonConvergence(format!("state solve {:?} after {} iterations", pair.status, pair.iterations)))
    }
}

fn optimality_checks(y: &YoungFunction, mesh: &Mesh, pair: &OptimalPair, seed: u64) -> Result<Value, CliError> {
    let monotone = pair.outer_history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs());
    let levels = cell_levels(y, mesh, &pair.u);
    let full = pair.phi.full_cells().iter().map(|&t| levels[t]).fold(f64::NEG_INFINITY, f64::max);
    let empty = (0..mesh.n_cells()).filter(|&t| pair.phi.values()[t] == 0.0).map(|t| levels[t]).fold(f64::INFINITY, f64::min);
    let sublevel = full <= empty + 1e-12 && pair.phi.fractional_cells().len() <= 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_derivative = f64::INFINITY;
    if pair.alpha > 0.0 && pair.c > 0.0 && pair.c < mesh.total_area() {
        for _ in 0..20 {
            let f = Direction::random(mesh, &pair.phi, &mut rng)?;
            min_derivative = min_derivative.min(directional_derivative(y, mesh, pair.alpha, &pair.u, &f));
        }
    }
    let first_order = !(min_derivative < -1e-8);
    Ok(json!({
        "outer_monotone": monotone,
        "sublevel_structure": sublevel,
        "first_order_optimality": first_order,
        "min_directional_derivative": if min_derivative.is_finite() { json!(min_derivative) } else { Value::Null },
        "pass": monotone && sublevel && first_order,
    }))
}

pub fn optimize(r: &Resolved, out: &Output) -> Result<(), CliError> {
    let alpha = single_alpha(&r.config)?;
    let pair = alternate_optimize(&r.young, &r.boundary, &r.mesh, alpha, r.config.c, &r.config.solver, &r.config.outer)?;
    let checks = optimality_checks(&r.young, &r.mesh, &pair, r.config.seed)?;
    let deviation = match r.mesh.domain() {
        Domain::Disk { .. } => json!(symmetry_deviation(&r.mesh, &pair.phi)?),
        _ => Value::Null,
    };
    out.csv("u.csv", &pair.u.to_csv())?;
    out.csv("phi.csv", &pair.phi.to_csv())?;
    out.csv("outer_history.csv", &outer_csv(&pair.outer_history))?;
    out.csv("history.csv", &pair.state.history_csv())?;
    let pass = checks["pass"].as_bool().unwrap_or(false);
    out.summary(
        "optimize",
        &r.config,
        json!({ "pair": pair.summary(), "state": pair_json(&pair.state), "checks": checks, "symmetry_deviation": deviation }),
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Invariant("optimal-pair checks failed".into()))
    }
}

pub fn limit(r: &Resolved, out: &Output) -> Result<(), CliError> {
    let c = r.config.c;
    let k = upper_bound_k(&r.young, &r.boundary, &r.mesh, c, &r.config.solver)?;
    let lim = solve_limit(&r.young, &r.boundary, &r.mesh, c, &r.config.solver, &LimitOptions::default())?;
    out.csv("u.csv", &lim.u.to_csv())?;
    out.csv("hole.csv", &lim.indicator(&r.mesh)?.to_csv())?;
    out.csv("outer_history.csv", &outer_csv(&lim.history))?;
    let mut pass = lim.invariants_hold() && lim.lambda <= k.k * (1.0 + 1e-9);
    let mut mono = Value::Null;
    if let Some(grid) = &r.config.c_grid {
        let rep = monotonicity_in_c(&r.young, &r.boundary, &r.mesh, grid, &r.config.solver, 4, r.config.seed)?;
        let mut csv = String::from("c,lambda,hole_area\n");
        for e in &rep.entries {
            let _ = writeln!(csv, "{},{},{}", e.c, e.lambda, e.hole_area);
        }
        out.csv("monotonicity.csv", &csv)?;
        pass &= rep.strictly_increasing && rep.samples_dominated && rep.entries.iter().all(|e| e.invariants_hold);
        mono = serde_json::to_value(&rep).map_err(|e| CliError::Config(e.to_string()))?;
    }
    out.summary(
        "limit",
        &r.config,
        json!({
            "lambda": lim.lambda,
            "k": k.k,
            "hole_area": lim.hole_area,
            "volume_mismatch": lim.volume_mismatch,
            "zero_set_area": lim.zero_set_area,
            "min_free_ratio": lim.min_free_ratio,
            "invariants_hold": lim.invariants_hold(),
            "monotonicity": mono,
            "pass": pass,
        }),
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Invariant("limit invariants failed".into()))
    }
}

pub fn sweep(r: &Resolved, out: &Output) -> Result<(), CliError> {
    let alphas = r.config.alpha.values();
    let rep = sweep_alpha(&r.young, &r.boundary, &r.mesh, r.config.c, &alphas, &r.config.solver, &r.config.outer)?;
    out.csv("sweep.csv", &rep.to_csv())?;
    out.csv("limit_u.csv", &rep.limit.u.to_csv())?;
    out.csv("limit_hole.csv", &rep.limit.indicator(&r.mesh)?.to_csv())?;
    let pass = rep.checks.all();
    out.summary(
        "sweep",
        &r.config,
        json!({
            "k": rep.k.k,
            "limit_lambda": rep.limit.lambda,
            "cold_start_lambda": rep.cold_start_lambda,
            "records": rep.records,
            "checks": rep.checks,
            "pass": pass,
        }),
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("sweep checks failed: {:?}", rep.checks)))
    }
}

pub fn symmetry(r: &Resolved, out: &Output) -> Result<(), CliError> {
    if !matches!(r.mesh.domain(), Domain::Disk { .. }) {
        return Err(CliError::Config("symmetry needs a disk domain".into()));
    }
    let alpha = single_alpha(&r.config)?;
    let grid = PolarGrid::new(r.config.polar.rings, r.config.polar.angles)?;
    let (u, mask, design) = match &r.config.field {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("field {}: {e}", path.display())))?;
            let u = if text.starts_with("ring,angle,value") {
                PolarField::from_csv(grid, &text)?
            } else {
                let nodal = NodalField::from_csv(text.as_bytes())?;
                PolarField::sample(grid, &r.mesh, &nodal)?
            };
            let empty = PolarField::from_fn(grid, |_, _| 0.0);
            (u, empty, Value::Null)
        }
        None => {
            let pair = alternate_optimize(&r.young, &r.boundary, &r.mesh, alpha, r.config.c, &r.config.solver, &r.config.outer)?;
            out.csv("phi.csv", &pair.phi.to_csv())?;
            let u = PolarField::sample(grid, &r.mesh, &pair.u)?;
            let t = pair.threshold;
            let mask = PolarField::from_values(grid, u.values().iter().map(|v| if *v <= t { 1.0 } else { 0.0 }).collect())?;
            let dev = symmetry_deviation(&r.mesh, &pair.phi)?;
            (u, mask, json!({ "lambda": pair.lambda, "symmetry_deviation": dev, "relative_to_c": if r.config.c > 0.0 { dev / r.config.c } else { 0.0 } }))
        }
    };
    let star = symmetrize_disk(&u);
    let scale = u.values().iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let field_deviation = u.values().iter().zip(star.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    let rep = symmetrization_checks(&r.young, &u, alpha.max(1.0), &mask)?;
    out.csv("polar_u.csv", &u.to_csv())?;
    out.csv("polar_u_star.csv", &star.to_csv())?;
    let pass = rep.pass();
    out.summary("symmetry", &r.config, json!({ "field_deviation": field_deviation, "checks": rep, "design": design, "pass": pass }))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Invariant("symmetrization checks failed".into()))
    }
}
