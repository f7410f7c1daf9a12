//! Divergence: ball-avoiding paths between points and ball-avoiding fillings of hypersurfaces.
//!
//! On grid patches the top-dimensional chain with a given boundary is unique, so the
//! exact ball-avoiding fill is either the unrestricted oracle fill or nothing at all.
//! The interesting cases are the ones where the ball sits inside that fill.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{ChamberSet, VertexId, UNREACHABLE};
use crate::decomposition::{round_partition_full, Assertion, PartitionCertificate};
use crate::error::{Error, Result};
use crate::filling::{bfs_tree, cone_fill, enumerate_fills, oracle_fill, oriented_cycles, solve_chain, ChainFill, SearchMode};
use crate::harness::fit::{fit_exponent, Fit};
use crate::hypersurface::orientation::Chain;
use crate::hypersurface::Hypersurface;
use crate::models::{boundary_sphere, rectangle_loop, square_loop, Model};

/// A ball-avoiding fill problem: fill `h` away from the open ball `B(c, δr)`.
#[derive(Clone, Debug)]
pub struct DivergenceQuery {
    pub h: Hypersurface,
    pub c: VertexId,
    pub r: u32,
    pub delta: f64,
}

impl DivergenceQuery {
    /// Checks `0 < δ < 1` and `r <= dist(c, h)`.
    pub fn new(model: &Model, h: Hypersurface, c: VertexId, r: u32, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        model.complex.check_vertex(c)?;
        let d = distance_to_image(model, &h, c);
        if r > d {
            return Err(Error::InvalidSpec(format!("r = {r} exceeds the distance {d} from the center to the hypersurface")));
        }
        Ok(Self { h, c, r, delta })
    }

    /// The query with `r` set to the distance from `c` to `h`.
    pub fn at_distance(model: &Model, h: Hypersurface, c: VertexId, delta: f64) -> Result<Self> {
        model.complex.check_vertex(c)?;
        let r = distance_to_image(model, &h, c);
        Self::new(model, h, c, r, delta)
    }

    pub fn k(&self) -> usize {
        self.h.k()
    }

    /// Radius of the forbidden ball.
    pub fn radius(&self) -> f64 {
        self.delta * self.r as f64
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidSpec(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn distance_to_image(model: &Model, h: &Hypersurface, c: VertexId) -> u32 {
    let row = model.metric.row(c);
    h.map.image.iter().map(|&w| row[w as usize]).min().unwrap_or(UNREACHABLE)
}

/// Vertices of the open ball `B(c, radius)` as a mask.
pub fn open_ball(model: &Model, c: VertexId, radius: f64) -> Vec<bool> {
    model.metric.row(c).iter().map(|&d| d != UNREACHABLE && (d as f64) < radius).collect()
}

/// Chambers with a vertex in the open ball `B(c, radius)`.
pub fn forbidden_chambers(model: &Model, c: VertexId, radius: f64) -> ChamberSet {
    let ball = open_ball(model, c, radius);
    let cx = &model.complex;
    ChamberSet::from_ids(
        cx.num_chambers(),
        (0..cx.num_chambers() as u32).filter(|&ch| cx.chamber(ch).iter().any(|&v| ball[v as usize])),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivMethod {
    Bfs,
    Oracle,
    /// Cone fills whose image misses the ball; an upper bound only.
    ConeBound,
    Transfer,
}

impl fmt::Display for DivMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DivMethod::Bfs => "bfs",
            DivMethod::Oracle => "oracle",
            DivMethod::ConeBound => "cone-bound",
            DivMethod::Transfer => "transfer",
        })
    }
}

/// A divergence value; `None` is ∞.
#[derive(Clone, Debug, Serialize)]
pub struct DivValue {
    pub value: Option<u64>,
    pub method: DivMethod,
    pub exact: bool,
    /// Exhaustive search agreed with the value; `None` when the window was too big to search.
    pub certified: Option<bool>,
}

/// Length of a shortest path from `a` to `b` avoiding the open ball of radius
/// `δ·dist(c, {a, b})` around `c`; `None` when the ball disconnects them.
pub fn div0(model: &Model, a: VertexId, b: VertexId, c: VertexId, delta: f64) -> Result<Option<u32>> {
    check_delta(delta)?;
    for v in [a, b, c] {
        model.complex.check_vertex(v)?;
    }
    if a == b || a == c || b == c {
        return Err(Error::Degenerate("div0 needs three distinct vertices".into()));
    }
    let row = model.metric.row(c);
    let (da, db) = (row[a as usize], row[b as usize]);
    if da == UNREACHABLE || db == UNREACHABLE {
        return Ok(None);
    }
    let ball = open_ball(model, c, delta * da.min(db) as f64);
    let d = model.complex.bfs_multi(&[a], Some(&ball))[b as usize];
    Ok((d != UNREACHABLE).then_some(d))
}

/// Smallest volume of a fill of `q.h` missing `B(c, δr)`.
///
/// Exact on grid patches. Elsewhere the best cone fill that happens to miss the
/// ball is returned as an upper bound, with apices tried from far away first.
pub fn divk(model: &Model, q: &DivergenceQuery) -> Result<DivValue> {
    let forbidden = forbidden_chambers(model, q.c, q.radius());
    if model.is_grid() {
        let f = oracle_fill(model, &q.h, Some(&forbidden))?;
        let searched = crate::filling::certify_window(model, &q.h, Some(&forbidden))?;
        return Ok(DivValue {
            value: f.volume,
            method: DivMethod::Oracle,
            exact: true,
            certified: searched.then_some(f.optimality_certificate),
        });
    }
    let ball = open_ball(model, q.c, q.radius());
    let row = model.metric.row(q.c);
    let mut apices: Vec<VertexId> = (0..model.complex.num_vertices() as u32).filter(|&v| row[v as usize] != UNREACHABLE).collect();
    apices.sort_by_key(|&v| (std::cmp::Reverse(row[v as usize]), v));
    apices.truncate(8);
    let best = apices
        .par_iter()
        .filter_map(|&a| {
            let comb = bfs_tree(&model.complex, a).ok()?;
            let d = cone_fill(model, &q.h, &comb).ok()?;
            d.map.image.iter().all(|&w| !ball[w as usize]).then(|| d.volume() as u64)
        })
        .min();
    Ok(DivValue { value: best, method: DivMethod::ConeBound, exact: false, certified: None })
}

/// Minimal ball-avoiding fill mass found by bounded search over the image bounding box,
/// minimized over the relative orientations of the components.
pub fn divk_search(model: &Model, q: &DivergenceQuery, mode: SearchMode) -> Result<Option<u64>> {
    let forbidden = forbidden_chambers(model, q.c, q.radius());
    let mut best: Option<u64> = None;
    for z in oriented_cycles(&q.h)? {
        let bound = z.0.values().map(|c| c.abs()).max().unwrap_or(0).max(1) + 1;
        let e = enumerate_fills(model, &z, Some(&forbidden), bound, mode)?;
        best = match (best, e.min_mass) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    Ok(best)
}

/// What is being kept away from the ball.
#[derive(Clone, Debug)]
pub enum DivTarget {
    Pair { a: VertexId, b: VertexId },
    Surface(Hypersurface),
}

/// One member of a sampled family.
#[derive(Clone, Debug)]
pub struct DivSample {
    pub id: usize,
    pub r: u32,
    pub c: VertexId,
    pub delta: f64,
    pub target: DivTarget,
}

impl DivSample {
    pub fn k(&self) -> usize {
        match &self.target {
            DivTarget::Pair { .. } => 0,
            DivTarget::Surface(h) => h.k(),
        }
    }
}

/// Only round spheres of bounded volume count: `diam <= η Vol^(1/k)` and `Vol <= 2A r^k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundFilter {
    pub eta: f64,
    pub a: f64,
}

/// One CSV row of a divergence run.
#[derive(Clone, Debug, Serialize)]
pub struct DivRecord {
    pub k: usize,
    pub r: u32,
    pub delta: f64,
    pub value: Option<u64>,
    pub finite: bool,
    pub method: DivMethod,
    #[serde(rename = "sampleId")]
    pub sample_id: usize,
    pub runtime_ms: u128,
    /// Unrestricted fill volume (or distance for pairs), for the sandwich check.
    #[serde(skip)]
    pub baseline: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivPoint {
    pub r: u32,
    /// Largest finite value at this `r`.
    pub value: Option<u64>,
    pub infinite: usize,
    pub samples: usize,
    /// Samples dropped by the round filter.
    pub filtered: usize,
}

/// Per-radius sup over a finite sample; the sample is all there is, never the true sup.
#[derive(Clone, Debug, Serialize)]
pub struct DivergenceProfile {
    pub records: Vec<DivRecord>,
    pub points: Vec<DivPoint>,
    pub fit: Option<Fit>,
    /// Errors of samples that could not be evaluated, by sample id.
    pub skipped: Vec<(usize, String)>,
}

impl DivergenceProfile {
    /// Records where a finite value falls below its unrestricted baseline.
    pub fn sandwich_violations(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| matches!((r.value, r.baseline), (Some(v), Some(b)) if v < b))
            .map(|r| r.sample_id)
            .collect()
    }
}

fn evaluate(model: &Model, s: &DivSample) -> Result<DivRecord> {
    let t = Instant::now();
    let (value, method, baseline) = match &s.target {
        DivTarget::Pair { a, b } => {
            let v = div0(model, *a, *b, s.c, s.delta)?;
            (v.map(u64::from), DivMethod::Bfs, model.metric.distance(*a, *b).map(u64::from))
        }
        DivTarget::Surface(h) => {
            let q = DivergenceQuery::new(model, h.clone(), s.c, s.r, s.delta)?;
            let d = divk(model, &q)?;
            let base = if model.is_grid() { oracle_fill(model, h, None)?.volume } else { None };
            (d.value, d.method, base)
        }
    };
    Ok(DivRecord {
        k: s.k(),
        r: s.r,
        delta: s.delta,
        value,
        finite: value.is_some(),
        method,
        sample_id: s.id,
        runtime_ms: t.elapsed().as_millis(),
        baseline,
    })
}

/// Divergence profile over a sampled family, optionally restricted to round spheres.
///
/// ∞ values stay out of the sup and are counted per radius. Samples that leave the
/// margin are listed in `skipped`.
pub fn div_profile(model: &Model, family: &[DivSample], round: Option<RoundFilter>) -> Result<DivergenceProfile> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let keep = |s: &DivSample| match (&s.target, round) {
        (DivTarget::Surface(h), Some(f)) => {
            h.is_round(&model.metric, f.eta) && h.volume() as f64 <= 2.0 * f.a * (s.r as f64).powi(h.k() as i32) + 1e-9
        }
        _ => true,
    };
    let kept: Vec<&DivSample> = family.iter().filter(|s| keep(s)).collect();
    let results: Vec<(usize, Result<DivRecord>)> = kept.par_iter().map(|s| (s.id, evaluate(model, s))).collect();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (id, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e @ (Error::EscapesMargin(_) | Error::InvalidSpec(_))) => skipped.push((id, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    records.sort_by_key(|r| (r.r, r.sample_id));
    let mut by_r: BTreeMap<u32, DivPoint> = BTreeMap::new();
    for s in family {
        let p = by_r.entry(s.r).or_insert(DivPoint { r: s.r, value: None, infinite: 0, samples: 0, filtered: 0 });
        if !keep(s) {
            p.filtered += 1;
        }
    }
    for rec in &records {
        let p = by_r.get_mut(&rec.r).expect("every record has a radius");
        p.samples += 1;
        match rec.value {
            Some(v) => p.value = Some(p.value.map_or(v, |w| w.max(v))),
            None => p.infinite += 1,
        }
    }
    let points: Vec<DivPoint> = by_r.into_values().collect();
    let pts: Vec<(f64, f64)> =
        points.iter().filter_map(|p| p.value.filter(|&v| v > 0 && p.r > 0).map(|v| (p.r as f64, v as f64))).collect();
    let fit = (pts.len() >= 3).then(|| fit_exponent(&pts)).transpose()?;
    Ok(DivergenceProfile { records, points, fit, skipped })
}

/// Pairs `c ∓ (n, 0)` around a grid center, one per `n`; `r = n`.
pub fn pair_family(model: &Model, center: [i32; 3], sizes: &[u32], delta: f64) -> Result<Vec<DivSample>> {
    let c = model.vertex_at(center)?;
    sizes
        .iter()
        .enumerate()
        .map(|(id, &n)| {
            let n = n as i32;
            let a = model.vertex_at([center[0] - n, center[1], center[2]])?;
            let b = model.vertex_at([center[0] + n, center[1], center[2]])?;
            model.margin.check([a, b])?;
            Ok(DivSample { id, r: n as u32, c, delta, target: DivTarget::Pair { a, b } })
        })
        .collect()
}

/// Hypersurfaces at distance exactly `s` from a grid center, for each `s`; `r = s`.
///
/// In the plane: a square of side `s` and a `4s × s/2` rectangle, both starting `s`
/// to the right of the center. In space: the `s`-cube starting `s` to the right.
pub fn near_family(model: &Model, center: [i32; 3], sizes: &[u32], delta: f64) -> Result<Vec<DivSample>> {
    let c = model.vertex_at(center)?;
    let mut out = Vec::new();
    for &size in sizes {
        let s = size as i32;
        let at = |dy: i32, dz: i32| model.vertex_at([center[0] + s, center[1] - dy, center[2] - dz]);
        let members = match model.complex.dim() {
            2 => {
                let thin = (size / 2).max(1);
                vec![square_loop(model, at(s / 2, 0)?, size)?, rectangle_loop(model, at(thin as i32 / 2, 0)?, 4 * size, thin)?]
            }
            3 => vec![boundary_sphere(model, at(s / 2, s / 2)?, size)?],
            d => return Err(Error::UnsupportedDimension(d)),
        };
        for h in members {
            out.push(DivSample { id: out.len(), r: size, c, delta, target: DivTarget::Surface(h) });
        }
    }
    Ok(out)
}

/// Ball-avoiding fill built from a round partition.
#[derive(Clone, Debug, Serialize)]
pub struct Transfer {
    /// `None` when some piece has no fill missing the ball.
    pub volume: Option<u64>,
    pub pieces: usize,
    /// Pieces of volume at most `ε r^k`.
    pub small: usize,
    /// Radius of the ball the assembled fill avoids, `δ(1−ε)r`.
    pub radius: f64,
    #[serde(skip)]
    pub fills: Vec<ChainFill>,
    #[serde(skip)]
    pub certificate: Option<PartitionCertificate>,
    pub assertions: Vec<Assertion>,
    pub constants: BTreeMap<String, f64>,
}

impl Transfer {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// Fills `h` away from `B(c, δ(1−ε)r)` by partitioning it into round pieces and
/// filling the pieces one at a time.
///
/// Curves are not partitioned and form a single piece.
pub fn divround_transfer(model: &Model, h: &Hypersurface, c: VertexId, r: u32, delta: f64, eps: f64) -> Result<Transfer> {
    check_delta(delta)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidSpec(format!("eps must lie in (0, 1), got {eps}")));
    }
    let k = h.k();
    if !(1..=2).contains(&k) {
        return Err(Error::UnsupportedDimension(k));
    }
    if !model.is_grid() {
        return Err(Error::UnsupportedAmbient);
    }
    // validates r against the distance to h
    DivergenceQuery::new(model, h.clone(), c, r, delta)?;
    let radius = delta * (1.0 - eps) * r as f64;
    let forbidden = forbidden_chambers(model, c, radius);
    let ball = open_ball(model, c, radius);

    let (cycles, certificate): (Vec<(Chain, usize)>, _) = if k == 2 {
        let cert = round_partition_full(model, h, eps)?;
        let report = cert.check(model)?;
        let pieces = cert.contours.iter().chain(&cert.remainder);
        let cycles = pieces.zip(&report.signs).map(|(p, s)| (p.surface.map.image_chain(s), p.volume())).collect();
        (cycles, Some(cert))
    } else {
        (vec![(h.map.image_chain(&h.orientation()?), h.volume())], None)
    };

    let small_cap = eps * (r as f64).powi(k as i32);
    let mut fills = Vec::new();
    let mut infinite = false;
    let (mut small, mut worst_l) = (0usize, 0.0f64);
    let near = model.metric.distance_to_set(&h.map.image_vertices());
    for (z, vol) in cycles.iter().filter(|(z, _)| !z.is_zero()) {
        match solve_chain(model, z, Some(&forbidden))? {
            Some(f) => {
                if *vol as f64 <= small_cap {
                    small += 1;
                    let rad = f.support().flat_map(|ch| model.complex.chamber(ch).to_vec()).map(|w| near[w as usize]).max();
                    worst_l = worst_l.max(rad.unwrap_or(0) as f64 / (eps * r as f64));
                }
                fills.push(f);
            }
            None => infinite = true,
        }
    }
    let mut assertions = Vec::new();
    if let Some(cert) = &certificate {
        assertions.extend(cert.assertions.iter().cloned());
    }
    let volume = (!infinite).then(|| fills.iter().map(ChainFill::mass).sum::<u64>());
    if !infinite {
        let touched = check_ball_avoiding(model, h, &fills, &ball)?;
        assertions.push(Assertion::le("transfer.ball_vertices", touched as f64, 0.0));
    }
    let mut constants = BTreeMap::new();
    constants.insert("eps".into(), eps);
    constants.insert("delta".into(), delta);
    constants.insert("L".into(), worst_l);
    Ok(Transfer { volume, pieces: cycles.len(), small, radius, fills, certificate, assertions, constants })
}

/// Checks that the fills add up to a chain bounded by `h` and returns how many
/// support vertices fall inside `ball`.
pub fn check_ball_avoiding(model: &Model, h: &Hypersurface, fills: &[ChainFill], ball: &[bool]) -> Result<usize> {
    let mut sum = Chain::default();
    for f in fills {
        sum.add(&f.to_chain(model)?);
    }
    let boundary = sum.boundary();
    let matches = oriented_cycles(h)?.into_iter().any(|mut z| {
        if z == boundary {
            return true;
        }
        z.negate();
        z == boundary
    });
    if !matches {
        return Err(Error::AssertionFailed("assembled fill does not bound the hypersurface".into()));
    }
    let mut verts: Vec<VertexId> =
        sum.0.keys().flat_map(|f| f.iter().copied()).filter(|&v| ball[v as usize]).collect();
    verts.sort_unstable();
    verts.dedup();
    Ok(verts.len())
}
