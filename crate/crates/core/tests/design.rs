mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steklov_core::design::*;
use steklov_core::mesh::{build_unit_disk, build_unit_square};
use steklov_core::modular::{cell_modulars, weighted_modular, DesignDensity, NodalField};
use steklov_core::state::{solve_state, SolverOptions, StateSolver};
use steklov_core::young::YoungFunction;

#[test]
fn bathtub_matches_brute_force_on_small_meshes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let y = YoungFunction::power_log(2.0).unwrap();
    for mesh in [build_unit_square(2).unwrap(), build_unit_disk(1).unwrap()] {
        for _ in 0..10 {
            let u = NodalField::new((0..mesh.n_vertices()).map(|_| rng.gen_range(0.0..3.0)).collect()).unwrap();
            let c = rng.gen_range(0.0..mesh.total_area());
            let (phi, _) = bathtub_step(&mesh, &cell_levels(&y, &mesh, &u), c).unwrap();
            let got = weighted_modular(&y, &mesh, &phi, &u);
            let want = brute_force_weighted_min(mesh.cell_areas(), &cell_modulars(&y, &mesh, &u), c);
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{got} vs {want}");
        }
    }
}

#[test]
fn optimal_pair_on_square() {
    let mesh = build_unit_square(10).unwrap();
    let y = YoungFunction::power(2.0);
    let opts = SolverOptions::default();
    let pair = alternate_optimize(&y, &y, &mesh, 10.0, 0.25, &opts, &OuterOptions::default()).unwrap();
    let uniform = solve_state(&y, &y, &mesh, 10.0, &DesignDensity::uniform(&mesh, 0.25).unwrap(), &opts, None).unwrap();
    assert!(pair.lambda < uniform.lambda);
    for w in pair.outer_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * w[0]);
    }
    assert!(pair.phi.fractional_cells().len() <= 1);
    assert!((pair.phi.volume() - 0.25).abs() < 1e-12);

    let levels = cell_levels(&y, &mesh, &pair.u);
    let full_max = pair.phi.full_cells().iter().map(|&c| levels[c]).fold(f64::NEG_INFINITY, f64::max);
    let empty_min = (0..mesh.n_cells()).filter(|&c| pair.phi.values()[c] == 0.0).map(|c| levels[c]).fold(f64::INFINITY, f64::min);
    assert!(full_max <= empty_min + 1e-12);
    assert!(full_max <= pair.threshold && pair.threshold <= empty_min);

    // the density is optimal for its own state
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base = weighted_modular(&y, &mesh, &pair.phi, &pair.u);
    for _ in 0..100 {
        let keys: Vec<f64> = (0..mesh.n_cells()).map(|_| rng.gen()).collect();
        let (psi, _) = bathtub_step(&mesh, &keys, 0.25).unwrap();
        assert!(base <= weighted_modular(&y, &mesh, &psi, &pair.u) + 1e-12);
    }
}

#[test]
fn derivative_formula_and_optimality() {
    let mesh = build_unit_square(8).unwrap();
    let y = YoungFunction::power(2.0);
    let tight = SolverOptions { tolerance: 1e-12, max_iterations: 20_000, ..Default::default() };
    let solver = StateSolver::new(&y, &y, &mesh, tight).unwrap();
    let alpha = 5.0;
    let pair = optimize_with(&solver, alpha, 0.3, &OuterOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    for _ in 0..20 {
        let f = Direction::random(&mesh, &pair.phi, &mut rng).unwrap();
        assert!(directional_derivative(&y, &mesh, alpha, &pair.u, &f) >= -1e-8);
    }
    let f = Direction::random(&mesh, &pair.phi, &mut rng).unwrap();
    let formula = directional_derivative(&y, &mesh, alpha, &pair.u, &f);
    let mut errs = vec![];
    for t in [1e-2, 1e-3, 1e-4] {
        let moved = solver.solve(alpha, &f.perturb(&mesh, &pair.phi, t).unwrap(), Some(&pair.u)).unwrap();
        errs.push(rel((moved.lambda - pair.lambda) / t, formula));
    }
    assert!(errs[2] < 1e-2, "{errs:?}");
    assert!(errs[2] < errs[0]);
}

#[test]
fn level_band_shrinks_under_refinement() {
    let y = YoungFunction::power(2.0);
    let mut measures = vec![];
    for n in [8, 16, 32] {
        let mesh = build_unit_square(n).unwrap();
        let pair = alternate_optimize(&y, &y, &mesh, 10.0, 0.25, &SolverOptions::default(), &OuterOptions::default()).unwrap();
        let levels = cell_levels(&y, &mesh, &pair.u);
        measures.push(level_set_measure(&mesh, &levels, pair.threshold, mesh.mesh_size()));
    }
    assert!(measures[1] < measures[0] && measures[2] < measures[1], "{measures:?}");
}

#[test]
fn symmetrization_properties_on_random_fields() {
    let grid = PolarGrid::new(24, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let y = YoungFunction::power_sum(1.5, 3.0).unwrap();
    for _ in 0..20 {
        let u = random_polar(grid, &mut rng);
        let us = symmetrize_disk(&u);
        for i in 0..=grid.rings {
            let mut a = u.ring(i).to_vec();
            let mut b = us.ring(i).to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
        let (r0, r1) = (rng.gen_range(0.1..0.5), rng.gen_range(0.6..1.0));
        let flip = rng.gen_bool(0.5);
        let d = PolarField::from_fn(grid, |r, th| if r >= r0 && r <= r1 && (th.sin() > 0.0) == flip { 1.0 } else { 0.0 });
        let rep = symmetrization_checks(&y, &u, 7.0, &d).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }
}

#[test]
fn symmetric_optimum_on_disk() {
    let mesh = build_unit_disk(4).unwrap();
    let y = YoungFunction::power(2.0);
    let c = std::f64::consts::PI / 4.0;
    let pair = alternate_optimize(&y, &y, &mesh, 10.0, c, &SolverOptions::default(), &OuterOptions::default()).unwrap();
    assert!(symmetry_deviation(&mesh, &pair.phi).unwrap() <= 0.05 * c);

    let grid = PolarGrid::new(16, 48).unwrap();
    let radial = PolarField::sample(grid, &mesh, &NodalField::from_fn(&mesh, |p| 1.0 + p[0] * p[0] + p[1] * p[1])).unwrap();
    assert!(PolarField::sample(grid, &build_unit_square(3).unwrap(), &[0.0; 16]).is_err());
    let sym = symmetrize_disk(&radial);
    // P1 interpolation of a radial field is only approximately radial
    let drift = radial.values().iter().zip(sym.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(drift < 0.05);
}

#[test]
fn boundary_cap_beats_centred_design() {
    let mesh = build_unit_disk(4).unwrap();
    let y = YoungFunction::power(2.0);
    let c = std::f64::consts::PI / 4.0;
    let opts = SolverOptions::default();
    let centred = alternate_optimize(&y, &y, &mesh, 10.0, c, &opts, &OuterOptions { init: OuterInit::FreeState, ..Default::default() }).unwrap();
    let best = alternate_optimize(&y, &y, &mesh, 10.0, c, &opts, &OuterOptions::default()).unwrap();
    assert!(best.lambda < 0.9 * centred.lambda, "{} vs {}", best.lambda, centred.lambda);
    for pair in [&centred, &best] {
        assert!(symmetry_deviation(&mesh, &pair.phi).unwrap() <= 0.05 * c);
    }
    // the winner touches the boundary
    let boundary = mesh.boundary_vertex_mask();
    assert!(best.phi.full_cells().iter().any(|&t| mesh.cells()[t].iter().any(|&v| boundary[v])));
}
