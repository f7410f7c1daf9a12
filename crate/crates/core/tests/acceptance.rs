//! One pass/fail line per acceptance criterion, at the stated tolerances.
//!
//! Lines go straight to stderr so they show up without `--nocapture`.

use std::collections::VecDeque;
use std::io::Write;
use std::time::{Duration, Instant};

use fillab::decomposition::{
    critical_radius, folded_unfolded_decomposition, pipeline_fill, remove_folded, round_partition_full, unfolded_to_round,
    PipelineParams,
};
use fillab::divergence::{
    div0, div_profile, divk, divk_search, divround_transfer, forbidden_chambers, near_family, open_ball, pair_family,
    DivergenceQuery,
};
use fillab::filling::{
    certify, fill, oriented_cycles, radius_growth_profile, growth_violations, solve_chain, FillMethod, Filling, SearchMode,
};
use fillab::harness::fit::ols;
use fillab::harness::fit_exponent;
use fillab::hypersurface::folded_set;
use fillab::models::{
    boundary_sphere, disjoint_union, dumbbell_sphere, perturbed_sphere, rectangle_loop, square_loop, BulbShape,
    DumbbellParams,
};
use fillab::{generate, ChamberSet, Hypersurface, Model, ModelKind, ModelSpec, VertexId};
use rayon::prelude::*;

/// Named checks for one criterion.
struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    start: Instant,
    checks: Vec<(String, bool, String)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str, budget_s: u64) -> Self {
        Self { id, title, budget: Duration::from_secs(budget_s), start: Instant::now(), checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push((name.into(), pass, detail.into()));
    }

    /// Prints the verdict line and the failed checks; returns the failed names.
    fn report(&mut self, label: &str) -> Vec<String> {
        let took = self.start.elapsed();
        self.check("runtime", took <= self.budget, format!("{:.1}s of {}s", took.as_secs_f64(), self.budget.as_secs()));
        let failed: Vec<String> = self.checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "{label} {}: {verdict} {} ({} checks, {:.1}s)", self.id, self.title, self.checks.len(), took.as_secs_f64());
        for (name, pass, detail) in &self.checks {
            if !pass || std::env::var_os("FILLAB_VERBOSE").is_some() {
                let _ = writeln!(err, "    {} {name}: {detail}", if *pass { "ok" } else { "FAILED" });
            }
        }
        failed
    }

    fn finish(mut self) {
        let failed = self.report("criterion");
        assert!(failed.is_empty(), "criterion {} failed: {failed:?}", self.id);
    }
}

fn grid(kind: ModelKind, extent: Vec<u32>, margin: u32) -> Model {
    generate(&ModelSpec::new(kind, 0).margin(margin).extent(extent)).unwrap()
}

fn squares_model() -> Model {
    grid(ModelKind::Grid2, vec![34, 34], 1)
}

fn cubes_model() -> Model {
    grid(ModelKind::Grid3, vec![8, 8, 8], 1)
}

const SQUARES: [u32; 4] = [4, 8, 16, 32];
const CUBES: [u32; 4] = [2, 3, 4, 6];

fn square(m: &Model, s: u32) -> Hypersurface {
    square_loop(m, m.vertex_at([1, 1, 0]).unwrap(), s).unwrap()
}

fn cube(m: &Model, s: u32) -> Hypersurface {
    boundary_sphere(m, m.vertex_at([1, 1, 1]).unwrap(), s).unwrap()
}

fn vol_root(h: &Hypersurface) -> f64 {
    (h.volume() as f64).powf(1.0 / h.k() as f64)
}

/// max/min over the last three values.
fn spread_top3(xs: &[f64]) -> f64 {
    let top = &xs[xs.len() - 3..];
    top.iter().copied().fold(f64::MIN, f64::max) / top.iter().copied().fold(f64::MAX, f64::min)
}

#[test]
fn criterion_1_euclidean_isoperimetry() {
    let mut c = Criterion::new(1, "euclidean isoperimetry", 60);
    let m2 = squares_model();
    let mut pts = Vec::new();
    for s in SQUARES {
        let h = square(&m2, s);
        let v = fill(&m2, &h, FillMethod::Oracle, None).unwrap().volume;
        c.check(format!("square.s{s}"), v == Some(2 * (s as u64).pow(2)), format!("{v:?} vs {}", 2 * s * s));
        pts.push((h.volume() as f64, v.unwrap_or(0) as f64));
    }
    let f = fit_exponent(&pts).unwrap();
    c.check("square.exponent", (f.slope - 2.0).abs() <= 0.05, format!("{:.4}", f.slope));

    let m3 = cubes_model();
    let mut pts = Vec::new();
    for s in CUBES {
        let h = cube(&m3, s);
        let v = fill(&m3, &h, FillMethod::Oracle, None).unwrap().volume;
        c.check(format!("cube.s{s}"), v == Some(6 * (s as u64).pow(3)), format!("{v:?} vs {}", 6 * s * s * s));
        pts.push((vol_root(&h), v.unwrap_or(0) as f64));
    }
    let f = fit_exponent(&pts).unwrap();
    c.check("cube.exponent", (f.slope - 3.0).abs() <= 0.10, format!("{:.4}", f.slope));
    c.finish();
}

#[test]
fn criterion_2_cone_inequality() {
    let mut c = Criterion::new(2, "cone inequality", 120);
    let m2 = squares_model();
    let m3 = cubes_model();
    let mut all = Vec::new();
    for (name, m, sizes, make) in [
        ("square", &m2, SQUARES, square as fn(&Model, u32) -> Hypersurface),
        ("cube", &m3, CUBES, cube as fn(&Model, u32) -> Hypersurface),
    ] {
        let mut ratios = Vec::new();
        for s in sizes {
            let h = make(m, s);
            let cone = fill(m, &h, FillMethod::Cone, None).unwrap();
            let oracle = fill(m, &h, FillMethod::Oracle, None).unwrap();
            c.check(format!("{name}.s{s}.oracle_le_cone"), oracle.volume <= cone.volume, format!("{:?} <= {:?}", oracle.volume, cone.volume));
            let r = cone.cone_constant.unwrap();
            ratios.push(r);
            all.push((format!("{name}.s{s}"), cone.volume.unwrap() as f64, (h.volume() as f64 + 1.0) * (h.diameter(&m.metric) as f64 + 1.0)));
        }
        let spread = spread_top3(&ratios);
        c.check(format!("{name}.ratio_spread"), spread < 2.0, format!("{spread:.3} over {ratios:.3?}"));
    }
    let c_cone = all.iter().map(|(_, v, d)| v / d).fold(0.0, f64::max);
    for (name, v, d) in &all {
        c.check(format!("{name}.bounded"), *v <= c_cone * d, format!("{v} <= {c_cone:.4} * {d}"));
    }
    c.check("c_cone", c_cone.is_finite() && c_cone > 0.0, format!("{c_cone:.4}"));
    c.finish();
}

#[test]
fn criterion_3_filling_radius() {
    let mut c = Criterion::new(3, "filling radius", 60);
    let m2 = squares_model();
    let m3 = cubes_model();
    for (name, m, sizes, make) in [
        ("square", &m2, SQUARES, square as fn(&Model, u32) -> Hypersurface),
        ("cube", &m3, CUBES, cube as fn(&Model, u32) -> Hypersurface),
    ] {
        let mut pts = Vec::new();
        for s in sizes {
            let h = make(m, s);
            let f = fill(m, &h, FillMethod::Oracle, None).unwrap();
            pts.push((vol_root(&h), f.radius.unwrap() as f64));
            let Filling::Chain(chain) = &f.filling else { panic!("oracle fills are chains") };
            let d = chain.to_domain(m, &h).unwrap();
            // every vertex of the domain, so the inequality is checked at every step of every profile
            let bad: usize = (0..d.map.domain.num_vertices() as VertexId)
                .into_par_iter()
                .map(|v| growth_violations(&radius_growth_profile(&d, &m.metric, v), h.k()).len())
                .sum();
            c.check(format!("{name}.s{s}.growth"), bad == 0, format!("{bad} violating steps over {} centres", d.map.domain.num_vertices()));
        }
        let (b, a) = ols(&pts);
        let max_r = pts.iter().map(|p| p.1).fold(0.0, f64::max);
        let worst = pts.iter().map(|&(x, y)| (y - a - b * x).abs()).fold(0.0, f64::max);
        c.check(
            format!("{name}.affine"),
            worst <= 0.05 * max_r,
            format!("R = {a:.3} + {b:.3} x, worst residual {worst:.3} vs {:.3}, points {pts:.2?}", 0.05 * max_r),
        );
    }
    c.finish();
}

#[test]
fn criterion_4_round_partition() {
    let mut c = Criterion::new(4, "round partition on 100 perturbed spheres", 300);
    let m = grid(ModelKind::Grid3, vec![14, 14, 14], 2);
    let corner = m.vertex_at([3, 3, 3]).unwrap();
    let results: Vec<(u64, Vec<String>, bool, usize)> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let (h, _) = perturbed_sphere(&m, corner, 8, seed).unwrap();
            let cert = round_partition_full(&m, &h, 0.5).unwrap();
            let glued = cert.check(&m).is_ok();
            (seed, cert.failures().iter().map(|a| a.name.clone()).collect(), glued, cert.assertions.len())
        })
        .collect();
    let mut asserted = 0;
    for (seed, failures, glued, n) in results {
        asserted += n;
        if !failures.is_empty() || !glued {
            c.check(format!("seed{seed}"), false, format!("failed {failures:?}, gluing ok {glued}"));
        }
    }
    c.check("certificates", true, format!("100 spheres, {asserted} assertions"));
    c.finish();
}

fn folded_checks(c: &mut Criterion, tag: &str, m: &Model, h: &Hypersurface, eps: f64, rho: f64) {
    let fs = folded_set(&h.map, &m.metric, eps, rho);
    c.check(format!("{tag}.folded_nonempty"), !fs.is_empty(), format!("{} folded vertices", fs.len()));
    for &y in &fs.members {
        let (_, checks) = critical_radius(h, &m.metric, y, eps, rho).unwrap();
        for a in checks {
            c.check(format!("{tag}.y{y}.{}", a.name), a.pass, format!("{:.3} vs {:.3}", a.measured, a.bound));
        }
    }
    let removal = remove_folded(m, h, eps, rho).unwrap();
    c.check(format!("{tag}.remove_folded"), removal.all_passed() && removal.check(m).is_ok(), format!("{:?}", removal.failures()));
    let delta = 0.25;
    let tt = folded_unfolded_decomposition(m, h, eps, delta).unwrap();
    // the remainder is unfolded at its own scale 6δ Vol^(1/k)
    let scale = 6.0 * delta * (tt.remainder_volume() as f64).sqrt();
    let left: usize = tt.remainder.iter().map(|p| folded_set(&p.surface.map, &m.metric, eps, scale).len()).sum();
    c.check(format!("{tag}.thickthin"), tt.all_passed() && tt.check(m).is_ok() && left == 0, format!("{:?}, {left} folded left", tt.failures()));
}

#[test]
fn criterion_5_folded_machinery() {
    let mut c = Criterion::new(5, "folded machinery on dumbbells", 120);
    for neck in [10, 20, 40] {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Box([2, 2, 2]), neck);
        let m = grid(ModelKind::Grid3, p.extent(1), 1);
        let h = dumbbell_sphere(&m, &p).unwrap();
        folded_checks(&mut c, &format!("neck{neck}"), &m, &h, 0.5, 10.0);
    }

    // at rho = 10 the fold threshold is below one chamber, so nothing can be folded;
    // the same checks at a scale where folds exist, reported but not part of the verdict
    let mut extra = Criterion::new(5, "folded machinery, tetra bulbs at rho = 50 (informational)", 120);
    for neck in [60, 80] {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Tetra, neck);
        let m = grid(ModelKind::Grid3, p.extent(1), 1);
        let h = dumbbell_sphere(&m, &p).unwrap();
        folded_checks(&mut extra, &format!("tetra{neck}"), &m, &h, 0.5, 50.0);
    }
    extra.report("supplement");
    c.finish();
}

#[test]
fn criterion_6_unfolded_to_round() {
    let mut c = Criterion::new(6, "unfolded to round", 60);
    let (eps, delta) = (0.5, 0.25);
    for (shape, sizes) in [("single", [2u32, 4, 6, 8]), ("pair", [2, 3, 4, 6])] {
        let mut kappas = Vec::new();
        for s in sizes {
            let (m, h, want) = if shape == "single" {
                let m = grid(ModelKind::Grid3, vec![s + 2; 3], 1);
                let h = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), s).unwrap();
                (m, h, 1)
            } else {
                // two spheres 4s apart
                let m = grid(ModelKind::Grid3, vec![6 * s + 2, s + 2, s + 2], 1);
                let a = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), s).unwrap();
                let b = boundary_sphere(&m, m.vertex_at([5 * s as i32 + 1, 1, 1]).unwrap(), s).unwrap();
                let u = disjoint_union(&m, &[a, b]).unwrap();
                (m, u, 2)
            };
            let cert = unfolded_to_round(&m, &h, eps, delta).unwrap();
            let glued = cert.check(&m).is_ok();
            let lower = eps * delta * delta / 2.0 * h.volume() as f64;
            let smallest = cert.contours.iter().map(|p| p.volume()).min().unwrap_or(0);
            c.check(
                format!("{shape}.s{s}"),
                cert.all_passed() && glued && cert.contours.len() == want && smallest as f64 >= lower,
                format!("{} pieces, smallest {smallest} vs {lower:.2}, failed {:?}", cert.contours.len(), cert.failures()),
            );
            kappas.push(cert.constants["kappa"]);
        }
        let mut sorted = kappas.clone();
        sorted.sort_by(f64::total_cmp);
        let mid = (sorted[1] + sorted[2]) / 2.0;
        let stable = kappas.iter().all(|&k| (k - mid).abs() <= 0.5 * mid);
        c.check(format!("{shape}.kappa_stable"), stable, format!("{kappas:.4?} around {mid:.4}"));
    }
    c.finish();
}

/// Plain BFS distance from `a` to `b` avoiding the open ball, as an independent reference.
fn bfs_avoiding(m: &Model, a: VertexId, b: VertexId, ball: &[bool]) -> Option<u32> {
    let mut dist = vec![u32::MAX; m.complex.num_vertices()];
    let mut q = VecDeque::from([a]);
    dist[a as usize] = 0;
    while let Some(v) = q.pop_front() {
        if v == b {
            return Some(dist[v as usize]);
        }
        for &w in m.complex.neighbors(v) {
            if !ball[w as usize] && dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                q.push_back(w);
            }
        }
    }
    None
}

#[test]
fn criterion_7_divergence() {
    let mut c = Criterion::new(7, "divergence", 600);

    // div0 on pairs c -+ (n, 0)
    let m = grid(ModelKind::Grid2, vec![132, 68], 1);
    let center = [66, 34, 0];
    let cv = m.vertex_at(center).unwrap();
    let mut pts = Vec::new();
    for n in [8i32, 16, 32, 64] {
        let (a, b) = (m.vertex_at([66 - n, 34, 0]).unwrap(), m.vertex_at([66 + n, 34, 0]).unwrap());
        let v = div0(&m, a, b, cv, 0.25).unwrap();
        let reference = bfs_avoiding(&m, a, b, &open_ball(&m, cv, 0.25 * n as f64));
        c.check(format!("div0.n{n}.bfs"), v == reference, format!("{v:?} vs {reference:?}"));
        c.check(format!("div0.n{n}.ge_2n"), v.is_some_and(|v| v >= 2 * n as u32), format!("{v:?}"));
        pts.push((n as f64, v.unwrap_or(0) as f64));
    }
    let f = fit_exponent(&pts).unwrap();
    c.check("div0.exponent", (f.slope - 1.0).abs() <= 0.10, format!("{:.4}", f.slope));

    // exact divk on the punctured 7^3 patch
    let spec = ModelSpec::new(ModelKind::BallRemovedGrid3, 7).margin(1).removal(vec![4, 4, 4], 0);
    let pm = generate(&spec).unwrap();
    let h = boundary_sphere(&pm, pm.vertex_at([1, 1, 1]).unwrap(), 2).unwrap();
    let q = DivergenceQuery::at_distance(&pm, h, pm.vertex_at([5, 5, 5]).unwrap(), 0.5).unwrap();
    let exhaustive = divk_search(&pm, &q, SearchMode::Exhaustive).unwrap();
    let bnb = divk_search(&pm, &q, SearchMode::BranchAndBound).unwrap();
    let exact = divk(&pm, &q).unwrap();
    c.check("divk.bnb_eq_exhaustive", bnb == exhaustive && exhaustive.is_some(), format!("{bnb:?} vs {exhaustive:?}"));
    c.check("divk.oracle_eq_search", exact.value == exhaustive && exact.certified == Some(true), format!("{exact:?}"));

    // sandwich on curve and sphere families
    let m2 = grid(ModelKind::Grid2, vec![100, 36], 1);
    let m3 = grid(ModelKind::Grid3, vec![30, 30, 30], 1);
    for (name, m, fam) in [
        ("loops", &m2, near_family(&m2, [2, 17, 0], &[2, 4, 8], 0.25).unwrap()),
        ("spheres", &m3, near_family(&m3, [2, 14, 14], &[2, 4, 6], 0.25).unwrap()),
    ] {
        let p = div_profile(m, &fam, None).unwrap();
        let finite = p.records.iter().filter(|r| r.finite).count();
        let bad = p.sandwich_violations();
        c.check(format!("sandwich.{name}"), bad.is_empty() && finite > 0, format!("{finite} finite samples, violations {bad:?}"));
    }

    // transfer: ball-avoiding, and no better than the exact value it competes with
    let eps = 0.5;
    let cases: Vec<(&Model, Hypersurface, VertexId)> = vec![
        (&m2, rectangle_loop(&m2, m2.vertex_at([10, 10, 0]).unwrap(), 6, 12).unwrap(), m2.vertex_at([4, 16, 0]).unwrap()),
        (&m2, square_loop(&m2, m2.vertex_at([20, 4, 0]).unwrap(), 8).unwrap(), m2.vertex_at([12, 8, 0]).unwrap()),
        (&m3, boundary_sphere(&m3, m3.vertex_at([12, 10, 10]).unwrap(), 6).unwrap(), m3.vertex_at([4, 13, 13]).unwrap()),
        (&m3, boundary_sphere(&m3, m3.vertex_at([8, 3, 3]).unwrap(), 4).unwrap(), m3.vertex_at([3, 5, 5]).unwrap()),
    ];
    for (i, (m, h, cv)) in cases.into_iter().enumerate() {
        let q = DivergenceQuery::at_distance(m, h.clone(), cv, 0.5).unwrap();
        let t = divround_transfer(m, &h, cv, q.r, 0.5, eps).unwrap();
        let same_ball = DivergenceQuery::new(m, h.clone(), cv, q.r, 0.5 * (1.0 - eps)).unwrap();
        let exact = divk(m, &same_ball).unwrap();
        let beats_exact = match (t.volume, exact.value, exact.certified) {
            (Some(v), Some(e), Some(true)) => v >= e,
            (None, _, _) => false,
            _ => true,
        };
        c.check(
            format!("transfer.{i}"),
            t.all_passed() && beats_exact,
            format!("volume {:?} vs exact {:?} (certified {:?}), {} pieces, failed {:?}", t.volume, exact.value, exact.certified, t.pieces, t.assertions.iter().filter(|a| !a.pass).map(|a| &a.name).collect::<Vec<_>>()),
        );
    }

    // pairs through the harness family builder
    let fam = pair_family(&m, center, &[8, 16, 32, 64], 0.25).unwrap();
    let p = div_profile(&m, &fam, None).unwrap();
    c.check("div0.profile_slope", p.fit.is_some_and(|f| (f.slope - 1.0).abs() <= 0.10), format!("{:?}", p.fit.map(|f| f.slope)));
    c.finish();
}

#[test]
fn criterion_8_pipeline_sandwich() {
    let mut c = Criterion::new(8, "pipeline sandwich", 300);
    let m = grid(ModelKind::Grid3, vec![14, 14, 14], 2);
    let params = PipelineParams::default();
    let mut ratios = Vec::new();
    for s in [2u32, 4, 6, 8] {
        let h = boundary_sphere(&m, m.vertex_at([2, 2, 2]).unwrap(), s).unwrap();
        let p = pipeline_fill(&m, &h, &params).unwrap();
        let ok = matches!((p.result.volume, p.oracle), (Some(a), Some(o)) if a >= o);
        c.check(format!("cube.s{s}"), ok, format!("assembled {:?} vs oracle {:?}", p.result.volume, p.oracle));
        ratios.push(p.ratio().unwrap_or(f64::INFINITY));
    }
    let spread = spread_top3(&ratios);
    c.check("cube.ratio_spread", spread < 2.0, format!("ratios {ratios:.3?}, max {:.3}", ratios.iter().copied().fold(0.0, f64::max)));
    for seed in 0..6u64 {
        let (h, _) = perturbed_sphere(&m, m.vertex_at([3, 3, 3]).unwrap(), 6, seed).unwrap();
        let p = pipeline_fill(&m, &h, &params).unwrap();
        let ok = matches!((p.result.volume, p.oracle), (Some(a), Some(o)) if a >= o);
        c.check(format!("perturbed.seed{seed}"), ok, format!("assembled {:?} vs oracle {:?}", p.result.volume, p.oracle));
    }
    c.finish();
}

#[test]
fn criterion_9_oracle_self_certification() {
    let mut c = Criterion::new(9, "oracle self-certification", 120);
    let m2 = grid(ModelKind::Grid2, vec![16, 16], 1);
    let m3 = cubes_model();
    let punctured = generate(&ModelSpec::new(ModelKind::BallRemovedGrid3, 7).margin(1).removal(vec![4, 4, 4], 0)).unwrap();
    let mut cases: Vec<(String, &Model, Hypersurface, Option<ChamberSet>)> = Vec::new();
    for s in 1..=10 {
        cases.push((format!("square.s{s}"), &m2, square(&m2, s), None));
    }
    for (w, h) in [(2, 7), (3, 5), (1, 9), (4, 6)] {
        cases.push((format!("rect.{w}x{h}"), &m2, rectangle_loop(&m2, m2.vertex_at([2, 3, 0]).unwrap(), w, h).unwrap(), None));
    }
    for s in [1, 2, 3] {
        cases.push((format!("cube.s{s}"), &m3, cube(&m3, s), None));
    }
    let a = boundary_sphere(&m3, m3.vertex_at([1, 1, 1]).unwrap(), 1).unwrap();
    let b = boundary_sphere(&m3, m3.vertex_at([4, 4, 4]).unwrap(), 2).unwrap();
    cases.push(("cube.union".into(), &m3, disjoint_union(&m3, &[a, b]).unwrap(), None));
    for (s, cx) in [(4, [8, 3, 0]), (6, [9, 5, 0]), (8, [11, 6, 0])] {
        let cv = m2.vertex_at(cx).unwrap();
        cases.push((format!("square.s{s}.ball"), &m2, square(&m2, s), Some(forbidden_chambers(&m2, cv, 2.5))));
    }
    let ph = boundary_sphere(&punctured, punctured.vertex_at([1, 1, 1]).unwrap(), 2).unwrap();
    let pc = punctured.vertex_at([5, 5, 5]).unwrap();
    cases.push(("punctured.ball".into(), &punctured, ph.clone(), Some(forbidden_chambers(&punctured, pc, 1.5))));
    cases.push(("punctured".into(), &punctured, ph, None));

    let (mut certified, mut skipped) = (0, 0);
    for (name, m, h, forb) in &cases {
        for (j, z) in oriented_cycles(h).unwrap().iter().enumerate() {
            let value = solve_chain(m, z, forb.as_ref()).unwrap().map(|f| f.mass());
            match certify(m, z, forb.as_ref(), value).unwrap() {
                Some(true) => certified += 1,
                Some(false) => c.check(format!("{name}.orientation{j}"), false, format!("oracle {value:?} is not minimal")),
                None => skipped += 1,
            }
        }
    }
    c.check("certified", certified >= 20, format!("{certified} cycles certified, {skipped} above 200 chambers"));
    c.finish();
}
