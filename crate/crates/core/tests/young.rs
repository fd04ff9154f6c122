use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steklov_core::young::*;

fn families() -> Vec<YoungFunction> {
    vec![
        YoungFunction::power(2.0),
        YoungFunction::power(1.5),
        YoungFunction::power(3.0),
        YoungFunction::power_log(2.0).unwrap(),
        YoungFunction::power_sum(2.0, 4.0).unwrap(),
        YoungFunction::power_sum(1.3, 2.5).unwrap(),
    ]
}

#[test]
fn suite_passes_for_builtin_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for y in families() {
        let rep = young_suite(&y, 1000, &mut rng).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.checks.iter().all(|c| c.samples >= 1000));
    }
}

#[test]
fn suite_flags_a_wrong_window() {
    // declared window (2, 2.5) is too narrow for t² log(1+t)
    let law = CustomLaw {
        name: "narrow".into(),
        big: std::sync::Arc::new(|t: f64| t * t * t.ln_1p()),
        density: std::sync::Arc::new(|t: f64| 2.0 * t * t.ln_1p() + t * t / (1.0 + t)),
    };
    let y = YoungFunction::custom(law, 2.0, 2.5).unwrap();
    let rep = young_suite(&y, 200, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert!(!rep.passed());
    assert!(!rep.window.pass);
}

/// Closed-form conjugate of `tᵖ`: `(p−1) (t/p)^{p/(p−1)}`.
fn power_conjugate(p: f64, t: f64) -> f64 {
    (p - 1.0) * (t / p).powf(p / (p - 1.0))
}

proptest! {
    #[test]
    fn power_conjugate_matches_legendre(p in 1.2f64..5.0, t in 1e-3f64..50.0) {
        let y = YoungFunction::power(p);
        let got = conjugate(&y, t).unwrap();
        let want = power_conjugate(p, t);
        prop_assert!((got - want).abs() <= 1e-8 * want.max(1e-300), "{} vs {}", got, want);
    }

    #[test]
    fn sandwich_and_triangle(k in 0usize..6, a in 1e-6f64..10.0, b in 1e-6f64..10.0) {
        let y = &families()[k];
        let (pm, pp) = (y.p_minus(), y.p_plus());
        let gab = y.eval(a * b);
        prop_assert!(a.powf(pm).min(a.powf(pp)) * y.eval(b) <= gab * (1.0 + 1e-8));
        prop_assert!(gab <= a.powf(pm).max(a.powf(pp)) * y.eval(b) * (1.0 + 1e-8));
        prop_assert!(y.eval(a + b) <= 2f64.powf(pp) * (y.eval(a) + y.eval(b)) * (1.0 + 1e-8));
    }

    #[test]
    fn young_inequality_and_round_trip(k in 0usize..6, s in 1e-3f64..10.0, t in 1e-3f64..10.0) {
        let y = &families()[k];
        let ct = conjugate(y, t).unwrap();
        prop_assert!(s * t <= (y.eval(s) + ct) * (1.0 + 1e-8));
        let gs = y.density(s);
        let eq = y.eval(s) + conjugate(y, gs).unwrap();
        prop_assert!((s * gs - eq).abs() <= 1e-8 * eq);
        let back = inverse_g(y, y.eval(s)).unwrap();
        prop_assert!((back - s).abs() <= 1e-10 * s);
    }

    #[test]
    fn convex_on_chords(k in 0usize..6, t1 in 0.0f64..10.0, t2 in 0.0f64..10.0, th in 0.0f64..1.0) {
        let y = &families()[k];
        let chord = th * y.eval(t1) + (1.0 - th) * y.eval(t2);
        prop_assert!(y.eval(th * t1 + (1.0 - th) * t2) <= chord + 1e-12 * chord.max(1.0));
    }
}
