//! Fillings of hypersurfaces: cone fills along a combing, exact chain fills on grids,
//! and the measurements made on them.

pub mod combing;
pub mod cone;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Metric, VertexId};
use crate::error::{Error, Result};
use crate::harness::fit::{fit_exponent, Fit};
use crate::hypersurface::orientation::Chain;
use crate::hypersurface::restrict::frontier;
use crate::hypersurface::{normalize_domain, FillingDomain, GrowthProfile, Hypersurface, Restriction};
use crate::models::Model;
use crate::ChamberSet;

pub use combing::{bfs_tree, build_combing, Combing};
pub use cone::{cone_fill, default_apex};
pub use oracle::{enumerate_fills, solve_chain, ChainFill, Enumeration, SearchMode};

/// Largest search window for which oracle values get an exhaustive certificate.
pub const CERTIFY_WINDOW: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FillMethod {
    Cone,
    Oracle,
    Heuristic,
}

impl fmt::Display for FillMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FillMethod::Cone => "cone",
            FillMethod::Oracle => "oracle",
            FillMethod::Heuristic => "heuristic",
        })
    }
}

impl FromStr for FillMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cone" => Ok(FillMethod::Cone),
            "oracle" => Ok(FillMethod::Oracle),
            "heuristic" => Ok(FillMethod::Heuristic),
            _ => Err(Error::InvalidSpec(format!("unknown fill method {s:?}"))),
        }
    }
}

/// The object realizing a fill.
#[derive(Clone, Debug)]
pub enum Filling {
    Domain(FillingDomain),
    Chain(ChainFill),
    /// Separate chain fills of the pieces of a partition; the volume counts every piece.
    Assembled(Vec<ChainFill>),
    /// No filling exists.
    Infinite,
}

#[derive(Clone, Debug)]
pub struct FillResult {
    pub method: FillMethod,
    pub filling: Filling,
    /// `None` is the infinite-fill marker.
    pub volume: Option<u64>,
    pub radius: Option<f64>,
    /// `volume / ((Vol(h)+1)(diam(h)+1))`.
    pub cone_constant: Option<f64>,
    /// The value was confirmed minimal by exhaustive search.
    pub optimality_certificate: bool,
}

impl FillResult {
    pub fn is_infinite(&self) -> bool {
        self.volume.is_none()
    }

    pub fn report(&self, runtime_ms: u128) -> FillReport {
        FillReport {
            method: self.method,
            volume: self.volume,
            radius: self.radius,
            cone_constant: self.cone_constant,
            optimality_certificate: self.optimality_certificate,
            runtime_ms,
        }
    }
}

/// JSON fill report.
#[derive(Clone, Debug, Serialize)]
pub struct FillReport {
    pub method: FillMethod,
    pub volume: Option<u64>,
    pub radius: Option<f64>,
    #[serde(rename = "coneConstant")]
    pub cone_constant: Option<f64>,
    #[serde(rename = "optimalityCertificate")]
    pub optimality_certificate: bool,
    pub runtime_ms: u128,
}

pub fn cone_constant(volume: u64, h: &Hypersurface, metric: &Metric) -> f64 {
    volume as f64 / ((h.volume() as f64 + 1.0) * (h.diameter(metric) as f64 + 1.0))
}

fn domain_result(model: &Model, h: &Hypersurface, method: FillMethod, d: FillingDomain) -> FillResult {
    let volume = d.volume() as u64;
    FillResult {
        method,
        radius: Some(d.radius(h, &model.metric)),
        cone_constant: Some(cone_constant(volume, h, &model.metric)),
        volume: Some(volume),
        filling: Filling::Domain(d),
        optimality_certificate: false,
    }
}

/// Fills `h` with the requested method. `apex` only matters for cone fills.
pub fn fill(model: &Model, h: &Hypersurface, method: FillMethod, apex: Option<VertexId>) -> Result<FillResult> {
    match method {
        FillMethod::Cone => {
            let apex = apex.unwrap_or_else(|| default_apex(h));
            let comb = bfs_tree(&model.complex, apex)?;
            Ok(domain_result(model, h, method, cone_fill(model, h, &comb)?))
        }
        FillMethod::Heuristic => heuristic_fill(model, h),
        FillMethod::Oracle => oracle_fill(model, h, None),
    }
}

/// Best cone fill over a handful of apex choices, with collapsed interior edges contracted.
///
/// Only an upper bound for the filling volume.
pub fn heuristic_fill(model: &Model, h: &Hypersurface) -> Result<FillResult> {
    let verts = h.map.image_vertices();
    let mut apices: Vec<VertexId> = (0..8).map(|i| verts[i * (verts.len() - 1) / 7]).collect();
    apices.dedup();
    let mut best: Option<FillingDomain> = None;
    let mut last_err = None;
    for a in apices {
        let comb = bfs_tree(&model.complex, a)?;
        match cone_fill(model, h, &comb) {
            Ok(d) => {
                // contraction never changes the volume, so only the winner is normalized
                if best.as_ref().is_none_or(|b| d.volume() < b.volume()) {
                    best = Some(d);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(d) => Ok(domain_result(model, h, FillMethod::Heuristic, normalize_domain(&d))),
        None => Err(last_err.expect("at least one apex tried")),
    }
}

/// Image cycles of `h` over all relative orientations of its components (first one fixed).
pub fn oriented_cycles(h: &Hypersurface) -> Result<Vec<Chain>> {
    let signs = h.orientation()?;
    let comps = h.map.domain.chamber_components();
    if comps.len() > 10 {
        return Ok(vec![h.map.image_chain(&signs)]);
    }
    Ok((0..1u32 << comps.len().saturating_sub(1))
        .map(|mask| {
            let mut s = signs.clone();
            for (i, comp) in comps.iter().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 1 {
                    for &c in comp {
                        s[c as usize] = -s[c as usize];
                    }
                }
            }
            h.map.image_chain(&s)
        })
        .collect())
}

/// Exact minimal chain fill of `h` avoiding `forbidden`; the infinite marker if there is none.
///
/// Components of a disconnected `h` may be filled with either relative orientation,
/// and the cheapest choice wins.
pub fn oracle_fill(model: &Model, h: &Hypersurface, forbidden: Option<&ChamberSet>) -> Result<FillResult> {
    if !model.is_grid() {
        return Err(Error::UnsupportedAmbient);
    }
    let mut best: Option<(Chain, ChainFill)> = None;
    let cycles = oriented_cycles(h)?;
    let mut first = None;
    for z in cycles {
        if let Some(f) = solve_chain(model, &z, forbidden)? {
            if best.as_ref().is_none_or(|(_, b)| f.mass() < b.mass()) {
                best = Some((z, f));
            }
        } else if first.is_none() {
            first = Some(z);
        }
    }
    let z = best.as_ref().map_or_else(|| first.clone().unwrap_or_default(), |(z, _)| z.clone());
    let volume = best.as_ref().map(|(_, f)| f.mass());
    let optimality_certificate = certify(model, &z, forbidden, volume)?.unwrap_or(false);
    Ok(match best {
        Some((_, f)) => FillResult {
            method: FillMethod::Oracle,
            radius: Some(f.radius(model, h)),
            cone_constant: None,
            volume,
            filling: Filling::Chain(f),
            optimality_certificate,
        },
        None => FillResult {
            method: FillMethod::Oracle,
            filling: Filling::Infinite,
            volume: None,
            radius: None,
            cone_constant: None,
            optimality_certificate,
        },
    })
}

/// Compares an oracle value with exhaustive search; `None` when the window is too large.
pub fn certify(model: &Model, z: &Chain, forbidden: Option<&ChamberSet>, value: Option<u64>) -> Result<Option<bool>> {
    if oracle::window(model, z, forbidden)?.len() > CERTIFY_WINDOW {
        return Ok(None);
    }
    let bound = z.0.values().map(|c| c.abs()).max().unwrap_or(0).max(1) + 1;
    let e = enumerate_fills(model, z, forbidden, bound, SearchMode::Exhaustive)?;
    Ok(Some(e.min_mass == value))
}

/// Whether every orientation cycle of `h` is small enough for [`certify`] to search.
pub fn certify_window(model: &Model, h: &Hypersurface, forbidden: Option<&ChamberSet>) -> Result<bool> {
    for z in oriented_cycles(h)? {
        if oracle::window(model, &z, forbidden)?.len() > CERTIFY_WINDOW {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `FillRad` of a realized fill; `None` for the infinite marker.
pub fn filling_radius(fill: &FillResult) -> Option<f64> {
    fill.radius
}

/// One row of a radius growth profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthStep {
    pub i: u32,
    pub volume: usize,
    pub boundary_volume: usize,
}

/// `(i, Vol(d(v,i)), Vol(∂d(v,i)))` for `i` from 0 until the restriction stops growing.
pub fn radius_growth_profile(fill: &FillingDomain, metric: &Metric, v: VertexId) -> Vec<GrowthStep> {
    let prof = GrowthProfile::compute(&fill.map, metric, v);
    (0..=prof.saturation())
        .map(|i| {
            let chambers = prof.chambers(i as i64);
            let r = Restriction { boundary: frontier(&fill.map.domain, &chambers), chambers };
            GrowthStep { i, volume: r.volume(&fill.map), boundary_volume: r.boundary_volume(&fill.map) }
        })
        .collect()
}

/// Steps violating `Vol(d(v,i+1)) >= Vol(d(v,i)) + Vol(∂d(v,i))/(k+1)`, checked in integers.
pub fn growth_violations(steps: &[GrowthStep], k: usize) -> Vec<u32> {
    steps
        .windows(2)
        .filter(|w| (k + 1) * (w[1].volume - w[0].volume) < w[0].boundary_volume)
        .map(|w| w[0].i)
        .collect()
}

/// One size of an isoperimetric profile.
#[derive(Clone, Debug, Serialize)]
pub struct IsoPoint {
    pub size: u32,
    /// `max Vol(h)^(1/k)` over the sample.
    pub x: f64,
    /// Largest finite fill volume over the sample.
    pub fill_volume: Option<u64>,
    pub infinite: usize,
    pub samples: usize,
    /// Why this size produced no data.
    pub gap: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoProfile {
    pub points: Vec<IsoPoint>,
    pub fit: Option<Fit>,
}

/// Per-size sup of the fill volume over a family, and the log-log slope against `Vol^(1/k)`.
///
/// Infinite fills are left out of the sup and counted separately. A size whose
/// hypersurfaces leave the margin is kept as a gap.
pub fn iso_profile<F>(model: &Model, sizes: &[u32], family: F, method: FillMethod) -> Result<IsoProfile>
where
    F: Fn(u32) -> Result<Vec<Hypersurface>> + Sync,
{
    if sizes.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let points = sizes
        .iter()
        .map(|&size| {
            let sample = match family(size) {
                Ok(s) if s.is_empty() => return Err(Error::EmptyFamily),
                Ok(s) => s,
                Err(e @ Error::EscapesMargin(_)) => {
                    return Ok(IsoPoint { size, x: 0.0, fill_volume: None, infinite: 0, samples: 0, gap: Some(e.to_string()) })
                }
                Err(e) => return Err(e),
            };
            let fills: Vec<Result<FillResult>> = sample.par_iter().map(|h| fill(model, h, method, None)).collect();
            let mut vols = Vec::new();
            for f in fills {
                match f {
                    Ok(f) => vols.push(f.volume),
                    Err(e @ Error::EscapesMargin(_)) => {
                        return Ok(IsoPoint { size, x: 0.0, fill_volume: None, infinite: 0, samples: 0, gap: Some(e.to_string()) })
                    }
                    Err(e) => return Err(e),
                }
            }
            let x = sample.iter().map(|h| (h.volume() as f64).powf(1.0 / h.k() as f64)).fold(0.0, f64::max);
            Ok(IsoPoint {
                size,
                x,
                fill_volume: vols.iter().flatten().copied().max(),
                infinite: vols.iter().filter(|v| v.is_none()).count(),
                samples: sample.len(),
                gap: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.fill_volume.filter(|&v| v > 0 && p.x > 0.0).map(|v| (p.x, v as f64)))
        .collect();
    let fit = (finite.len() >= 3).then(|| fit_exponent(&finite)).transpose()?;
    Ok(IsoProfile { points, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{boundary_sphere, generate, square_loop, ModelKind, ModelSpec};

    #[test]
    fn oracle_and_cone_on_a_square() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 24).margin(1)).unwrap();
        let h = square_loop(&m, m.vertex_at([1, 1, 0]).unwrap(), 8).unwrap();
        let o = fill(&m, &h, FillMethod::Oracle, None).unwrap();
        assert_eq!(o.volume, Some(128));
        assert!(o.radius.unwrap() <= 5.0);
        assert!(o.optimality_certificate);
        let far = m.vertex_at([22, 22, 0]).unwrap();
        let c = fill(&m, &h, FillMethod::Cone, Some(far)).unwrap();
        assert!(c.volume.unwrap() >= 128);
        assert!(c.radius.unwrap() > o.radius.unwrap());
        let hr = fill(&m, &h, FillMethod::Heuristic, None).unwrap();
        assert!(hr.volume.unwrap() >= 128);
    }

    #[test]
    fn radius_counts_edge_midpoints() {
        // odd cubes have no central vertex; the middle of the central edges is what is far
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 8).margin(1)).unwrap();
        for (s, r) in [(2, 1.0), (3, 1.5), (4, 2.0), (5, 2.5)] {
            let h = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), s).unwrap();
            assert_eq!(fill(&m, &h, FillMethod::Oracle, None).unwrap().radius, Some(r), "s = {s}");
        }
    }

    #[test]
    fn small_oracle_values_are_certified() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 8).margin(1)).unwrap();
        let h = square_loop(&m, m.vertex_at([1, 1, 0]).unwrap(), 4).unwrap();
        let o = fill(&m, &h, FillMethod::Oracle, None).unwrap();
        assert_eq!(o.volume, Some(32));
        assert!(o.optimality_certificate);
    }

    #[test]
    fn growth_inequality_on_a_cube_fill() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 6).margin(1)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), 4).unwrap();
        let Filling::Chain(f) = fill(&m, &h, FillMethod::Oracle, None).unwrap().filling else { panic!() };
        let d = f.to_domain(&m, &h).unwrap();
        let center = d.map.image.iter().position(|&w| w == m.vertex_at([3, 3, 3]).unwrap()).unwrap() as u32;
        let steps = radius_growth_profile(&d, &m.metric, center);
        assert_eq!((steps[0].volume, steps[1].volume), (0, 24));
        assert!(growth_violations(&steps, 2).is_empty(), "{steps:?}");
        assert_eq!(steps.last().unwrap().volume, 384);
    }

    #[test]
    fn square_family_profile() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 34).margin(1)).unwrap();
        let corner = m.vertex_at([1, 1, 0]).unwrap();
        let p = iso_profile(&m, &[4, 8, 16, 32], |s| Ok(vec![square_loop(&m, corner, s)?]), FillMethod::Oracle).unwrap();
        let fit = p.fit.unwrap();
        assert!((fit.slope - 2.0).abs() < 0.05);
        assert!(matches!(iso_profile(&m, &[], |_| Ok(vec![]), FillMethod::Oracle), Err(Error::EmptyFamily)));
        let gap = iso_profile(&m, &[4, 40], |s| Ok(vec![square_loop(&m, corner, s)?]), FillMethod::Oracle).unwrap();
        assert!(gap.points[1].gap.is_some());
    }
}
