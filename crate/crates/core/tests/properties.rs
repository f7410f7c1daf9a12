//! Randomized invariants across modules.

use fillab::decomposition::round_partition_full;
use fillab::divergence::{div0, divk, DivergenceQuery};
use fillab::filling::{fill, FillMethod};
use fillab::harness::fit_exponent;
use fillab::models::{perturbed_sphere, rectangle_loop, square_loop};
use fillab::{generate, Hypersurface, Model, ModelKind, ModelSpec};
use proptest::prelude::*;
use std::sync::OnceLock;

fn grid2() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| generate(&ModelSpec::new(ModelKind::Grid2, 24)).unwrap())
}

fn grid3() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| generate(&ModelSpec::new(ModelKind::Grid3, 14).margin(2)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rectangles_fill_to_their_area(x in 1i32..8, y in 1i32..8, w in 1u32..12, h in 1u32..12) {
        let m = grid2();
        let loop_ = rectangle_loop(m, m.vertex_at([x, y, 0]).unwrap(), w, h).unwrap();
        let oracle = fill(m, &loop_, FillMethod::Oracle, None).unwrap();
        let cone = fill(m, &loop_, FillMethod::Cone, None).unwrap();
        prop_assert_eq!(oracle.volume, Some(2 * w as u64 * h as u64));
        prop_assert!(oracle.volume <= cone.volume);
        prop_assert!(oracle.optimality_certificate || 2 * w * h > 200);
    }

    #[test]
    fn hsf_round_trips(x in 1i32..10, y in 1i32..10, s in 1u32..10) {
        let m = grid2();
        let h = square_loop(m, m.vertex_at([x, y, 0]).unwrap(), s).unwrap();
        let back = Hypersurface::parse_hsf(&h.to_hsf(), "t", &m.complex).unwrap();
        prop_assert_eq!(back.to_hsf(), h.to_hsf());
        prop_assert_eq!(back.volume(), h.volume());
    }

    #[test]
    fn detours_are_never_shorter(
        ax in 1i32..23, ay in 1i32..23, bx in 1i32..23, by in 1i32..23,
        cx in 1i32..23, cy in 1i32..23, delta in 0.05f64..0.95,
    ) {
        let m = grid2();
        let (a, b, c) = (m.vertex_at([ax, ay, 0]).unwrap(), m.vertex_at([bx, by, 0]).unwrap(), m.vertex_at([cx, cy, 0]).unwrap());
        prop_assume!(a != b && a != c && b != c);
        let d = m.metric.distance(a, b).unwrap();
        if let Some(v) = div0(m, a, b, c, delta).unwrap() {
            prop_assert!(v >= d);
        }
    }

    #[test]
    fn bigger_balls_cost_more(x in 1i32..6, y in 1i32..6, s in 1u32..5, d1 in 0.05f64..0.95, d2 in 0.05f64..0.95) {
        let m = grid2();
        let h = square_loop(m, m.vertex_at([x, y, 0]).unwrap(), s).unwrap();
        let c = m.vertex_at([20, 20, 0]).unwrap();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let q = |d| DivergenceQuery::at_distance(m, h.clone(), c, d).unwrap();
        let a = divk(m, &q(lo)).unwrap().value.unwrap_or(u64::MAX);
        let b = divk(m, &q(hi)).unwrap().value.unwrap_or(u64::MAX);
        prop_assert!(a <= b);
    }

    #[test]
    fn power_laws_are_recovered(c in 0.1f64..100.0, p in -3.0f64..4.0, n in 3usize..8) {
        let pts: Vec<(f64, f64)> = (0..n).map(|i| {
            let x = 2f64.powi(i as i32 + 1);
            (x, c * x.powf(p))
        }).collect();
        let f = fit_exponent(&pts).unwrap();
        prop_assert!((f.slope - p).abs() < 1e-9);
        prop_assert!(f.residual < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn perturbed_spheres_partition_cleanly(seed in 0u64..10_000, side in 5u32..8) {
        let m = grid3();
        let (h, _) = perturbed_sphere(m, m.vertex_at([3, 3, 3]).unwrap(), side, seed).unwrap();
        let oracle = fill(m, &h, FillMethod::Oracle, None).unwrap();
        let heur = fill(m, &h, FillMethod::Heuristic, None).unwrap();
        prop_assert!(oracle.volume <= heur.volume);
        let cert = round_partition_full(m, &h, 0.5).unwrap();
        prop_assert!(cert.check(m).is_ok());
        prop_assert!(cert.all_passed(), "{:?}", cert.failures());
    }
}
