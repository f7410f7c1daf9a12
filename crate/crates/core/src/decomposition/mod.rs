//! Partitions of a hypersurface into contours and a remainder.
//!
//! Every producer records, for each output chamber, where it came from: a chamber
//! of the source or a chamber of one of the cap disks glued along a cut circle.
//! One checker validates all of them the same way.

mod check;
mod folded;
mod pipeline;
mod round;
mod surgery;
mod thickround;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{ChamberId, Metric, SimplicialComplex, VertexId, UNREACHABLE};
use crate::error::{Error, Result};
use crate::hypersurface::{FillingDomain, Hypersurface, SimplicialMap};
use crate::models::Model;

pub use check::{check_certificate, GluingReport};
pub use folded::{critical_radius, folded_unfolded_decomposition, remove_folded};
pub use pipeline::{pipeline_fill, PipelineFill, PipelineParams};
pub use round::{r0_radius, round_partition_full, round_partition_step, theta};
pub use thickround::unfolded_to_round;

/// Where a chamber of a piece comes from.
///
/// `verts[j]` is the origin vertex hit by the j-th (sorted) vertex of the piece chamber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberOrigin {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    pub chamber: ChamberId,
    pub verts: Vec<VertexId>,
}

/// A contour or remainder component with its chamber provenance.
#[derive(Clone, Debug)]
pub struct Piece {
    pub surface: Hypersurface,
    pub origins: Vec<ChamberOrigin>,
}

impl Piece {
    /// The source itself, every chamber mapped to itself.
    pub fn root(h: &Hypersurface) -> Self {
        let origins = h
            .map
            .domain
            .chambers()
            .enumerate()
            .map(|(c, verts)| ChamberOrigin { cap: None, chamber: c as u32, verts: verts.to_vec() })
            .collect();
        Self { surface: h.clone(), origins }
    }

    pub fn volume(&self) -> usize {
        self.surface.volume()
    }

    /// Connected components as separate pieces.
    pub fn components(&self, model: &Model) -> Result<Vec<Piece>> {
        let dom = &self.surface.map.domain;
        let comps = dom.chamber_components();
        if comps.len() == 1 {
            return Ok(vec![self.clone()]);
        }
        comps
            .iter()
            .map(|comp| {
                let mut ids: Vec<VertexId> = comp.iter().flat_map(|&c| dom.chamber(c).iter().copied()).collect();
                ids.sort_unstable();
                ids.dedup();
                let rank = |v: VertexId| ids.binary_search(&v).unwrap() as u32;
                let simplices: Vec<Vec<u32>> = comp.iter().map(|&c| dom.chamber(c).iter().map(|&v| rank(v)).collect()).collect();
                let image = ids.iter().map(|&v| self.surface.map.image[v as usize]).collect();
                let cx = SimplicialComplex::with_vertex_count(ids.len(), &simplices)?;
                let surface = Hypersurface::infer(SimplicialMap::new(cx, image, &model.complex)?)?;
                let origins = comp.iter().map(|&c| self.origins[c as usize].clone()).collect();
                Ok(Piece { surface, origins })
            })
            .collect()
    }

    /// Disjoint union of pieces; `None` when there is nothing to join.
    pub fn union(model: &Model, pieces: &[Piece]) -> Result<Option<Piece>> {
        match pieces {
            [] => Ok(None),
            [p] => Ok(Some(p.clone())),
            _ => {
                let mut simplices: Vec<Vec<u32>> = Vec::new();
                let mut image = Vec::new();
                let mut origins = Vec::new();
                for p in pieces {
                    let base = image.len() as u32;
                    simplices.extend(p.surface.map.domain.chambers().map(|c| c.iter().map(|&v| v + base).collect()));
                    image.extend_from_slice(&p.surface.map.image);
                    origins.extend(p.origins.iter().cloned());
                }
                let cx = SimplicialComplex::with_vertex_count(image.len(), &simplices)?;
                let surface = Hypersurface::infer(SimplicialMap::new(cx, image, &model.complex)?)?;
                Ok(Some(Piece { surface, origins }))
            }
        }
    }
}

/// A disk glued along one cut circle; its boundary is the circle in order.
#[derive(Clone, Debug)]
pub struct Cap {
    pub disk: FillingDomain,
}

/// One literal inequality checked on a producer's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
}

impl Assertion {
    pub fn le(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), pass: measured <= bound + 1e-9, measured, bound }
    }

    pub fn ge(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), pass: measured + 1e-9 >= bound, measured, bound }
    }
}

/// Radii chosen at a selected vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "lowercase")]
pub enum CriticalRadii {
    Round { y: VertexId, r0: u32 },
    Folded { y: VertexId, big_r: u32, r_star: u32, r: u32 },
}

/// Output of a partition producer, checkable by [`check_certificate`].
#[derive(Clone, Debug)]
pub struct PartitionCertificate {
    pub operation: String,
    pub source: Hypersurface,
    pub caps: Vec<Cap>,
    pub contours: Vec<Piece>,
    /// Remainder components, including volume-zero ones.
    pub remainder: Vec<Piece>,
    pub constants: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub radii: Vec<CriticalRadii>,
    pub flags: Vec<String>,
}

impl PartitionCertificate {
    pub(crate) fn new(operation: &str, source: &Hypersurface) -> Self {
        Self {
            operation: operation.into(),
            source: source.clone(),
            caps: Vec::new(),
            contours: Vec::new(),
            remainder: Vec::new(),
            constants: BTreeMap::new(),
            assertions: Vec::new(),
            radii: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.pass).collect()
    }

    pub fn contour_volume(&self) -> usize {
        self.contours.iter().map(Piece::volume).sum()
    }

    pub fn remainder_volume(&self) -> usize {
        self.remainder.iter().map(Piece::volume).sum()
    }

    pub fn check(&self, model: &Model) -> Result<GluingReport> {
        check_certificate(self, model)
    }

    pub fn to_json(&self) -> Result<String> {
        let piece = |p: &Piece| PieceFile { hsf: p.surface.to_hsf(), origins: p.origins.clone() };
        let file = CertFile {
            format: CERT_FORMAT.into(),
            operation: self.operation.clone(),
            source: self.source.to_hsf(),
            caps: self
                .caps
                .iter()
                .map(|c| CapFile {
                    scx: c.disk.map.domain.to_scx(),
                    image: c.disk.map.image.clone(),
                    boundary: c.disk.boundary.clone(),
                })
                .collect(),
            contours: self.contours.iter().map(piece).collect(),
            remainder: self.remainder.iter().map(piece).collect(),
            constants: self.constants.clone(),
            assertions: self.assertions.clone(),
            radii: self.radii.clone(),
            flags: self.flags.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses a `.cert` file; surfaces are validated against the model.
    pub fn from_json(text: &str, model: &Model) -> Result<Self> {
        let file: CertFile = serde_json::from_str(text)?;
        if file.format != CERT_FORMAT {
            return Err(Error::CertificateInvalid(format!("unknown format {:?}", file.format)));
        }
        let ambient = &model.complex;
        let piece = |p: &PieceFile| -> Result<Piece> {
            Ok(Piece { surface: Hypersurface::parse_hsf(&p.hsf, "<cert piece>", ambient)?, origins: p.origins.clone() })
        };
        let caps = file
            .caps
            .iter()
            .map(|c| {
                let cx = SimplicialComplex::parse_scx(&c.scx, "<cert cap>")?;
                let map = SimplicialMap::new(cx, c.image.clone(), ambient)?;
                Ok(Cap { disk: FillingDomain { map, boundary: c.boundary.clone() } })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            operation: file.operation,
            source: Hypersurface::parse_hsf(&file.source, "<cert source>", ambient)?,
            caps,
            contours: file.contours.iter().map(piece).collect::<Result<_>>()?,
            remainder: file.remainder.iter().map(piece).collect::<Result<_>>()?,
            constants: file.constants,
            assertions: file.assertions,
            radii: file.radii,
            flags: file.flags,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path, model: &Model) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, model)
    }
}

const CERT_FORMAT: &str = "fillab-cert v1";

#[derive(Serialize, Deserialize)]
struct CertFile {
    format: String,
    operation: String,
    source: String,
    caps: Vec<CapFile>,
    contours: Vec<PieceFile>,
    remainder: Vec<PieceFile>,
    constants: BTreeMap<String, f64>,
    assertions: Vec<Assertion>,
    #[serde(default)]
    radii: Vec<CriticalRadii>,
    #[serde(default)]
    flags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CapFile {
    scx: String,
    image: Vec<VertexId>,
    boundary: Vec<VertexId>,
}

#[derive(Serialize, Deserialize)]
struct PieceFile {
    hsf: String,
    origins: Vec<ChamberOrigin>,
}

/// Largest distance from an image vertex of `pieces` to the image of `h`.
pub(crate) fn spread(metric: &Metric, h: &Hypersurface, pieces: &[&Piece]) -> u32 {
    let d = metric.distance_to_set(&h.map.image_vertices());
    pieces
        .iter()
        .flat_map(|p| p.surface.map.image.iter())
        .map(|&w| d[w as usize])
        .map(|x| if x == UNREACHABLE { u32::MAX } else { x })
        .max()
        .unwrap_or(0)
}

/// `Vol^(1/k)`.
pub(crate) fn vol_root(vol: usize, k: usize) -> f64 {
    (vol as f64).powf(1.0 / k as f64)
}

pub(crate) fn require_surface(h: &Hypersurface) -> Result<()> {
    if h.k() != 2 {
        return Err(Error::UnsupportedDimension(h.k()));
    }
    Ok(())
}

/// Pieces and checks produced by one operation on one work piece.
#[derive(Default)]
pub(crate) struct Stage {
    pub contours: Vec<Piece>,
    pub remainder: Vec<Piece>,
    pub assertions: Vec<Assertion>,
    pub constants: BTreeMap<String, f64>,
    pub radii: Vec<CriticalRadii>,
    pub flags: Vec<String>,
}

impl Stage {
    pub(crate) fn into_certificate(self, operation: &str, source: &Hypersurface, caps: Vec<Cap>) -> PartitionCertificate {
        let mut cert = PartitionCertificate::new(operation, source);
        cert.caps = caps;
        cert.contours = self.contours;
        cert.remainder = self.remainder;
        cert.constants = self.constants;
        cert.assertions = self.assertions;
        cert.radii = self.radii;
        cert.flags = self.flags;
        cert
    }

    /// Worst case of a family of `lhs <= rhs` checks, one assertion for the family.
    pub(crate) fn worst_le(&mut self, name: &str, pairs: impl IntoIterator<Item = (f64, f64)>) {
        if let Some((l, r)) = pairs.into_iter().max_by(|a, b| (a.0 - a.1).total_cmp(&(b.0 - b.1))) {
            self.assertions.push(Assertion::le(name, l, r));
        }
    }

    pub(crate) fn worst_ge(&mut self, name: &str, pairs: impl IntoIterator<Item = (f64, f64)>) {
        if let Some((l, r)) = pairs.into_iter().min_by(|a, b| (a.0 - a.1).total_cmp(&(b.0 - b.1))) {
            self.assertions.push(Assertion::ge(name, l, r));
        }
    }

    /// Merges a sub-stage, prefixing its assertion names.
    pub(crate) fn absorb_checks(&mut self, prefix: &str, other: &mut Stage) {
        for mut a in other.assertions.drain(..) {
            a.name = format!("{prefix}{}", a.name);
            self.assertions.push(a);
        }
        self.radii.append(&mut other.radii);
        for f in other.flags.drain(..) {
            if !self.flags.contains(&f) {
                self.flags.push(f);
            }
        }
    }
}

/// Number of non-degenerate frontier faces of a chamber set.
pub(crate) fn frontier_volume(map: &SimplicialMap, set: &crate::complex::ChamberSet) -> usize {
    crate::hypersurface::restrict::frontier(&map.domain, set)
        .iter()
        .filter(|f| {
            let img: Vec<VertexId> = f.iter().map(|&v| map.image[v as usize]).collect();
            (0..img.len()).all(|i| !img[i + 1..].contains(&img[i]))
        })
        .count()
}

/// Vertices of the chambers in `set`.
pub(crate) fn vertices_of(map: &SimplicialMap, set: &crate::complex::ChamberSet) -> Vec<bool> {
    let mut out = vec![false; map.domain.num_vertices()];
    for c in set.iter() {
        for &v in map.domain.chamber(c) {
            out[v as usize] = true;
        }
    }
    out
}

/// Number of pairs of sets sharing a chamber.
pub(crate) fn overlapping_pairs(sets: &[crate::complex::ChamberSet]) -> usize {
    let mut n = 0;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_disjoint(&sets[j]) {
                n += 1;
            }
        }
    }
    n
}
