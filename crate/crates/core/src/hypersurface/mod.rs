//! Simplicial maps into a model complex: hypersurfaces, filling domains and their measurements.

pub mod cut;
pub mod folded;
pub mod normalize;
pub mod orientation;
pub mod restrict;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::complex::{parse_scx_lines, ChamberId, FaceKey, Metric, SimplicialComplex, VertexId, UNREACHABLE};
use crate::error::{Error, Result};
use orientation::{orient_chambers, Chain};

pub use cut::{cut, CutComplex};
pub use folded::{folded_set, FoldedSet};
pub use normalize::normalize_domain;
pub use restrict::{restrict, GrowthProfile, Restriction};

/// A simplicial map from a domain complex into an ambient complex.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub domain: Arc<SimplicialComplex>,
    pub image: Vec<VertexId>,
}

impl SimplicialMap {
    /// Checks that every domain chamber maps onto an ambient simplex.
    pub fn new(domain: SimplicialComplex, image: Vec<VertexId>, ambient: &SimplicialComplex) -> Result<Self> {
        let map = Self { domain: Arc::new(domain), image };
        map.validate(ambient)?;
        Ok(map)
    }

    pub fn validate(&self, ambient: &SimplicialComplex) -> Result<()> {
        if self.image.len() != self.domain.num_vertices() {
            return Err(Error::InvalidMap(format!(
                "{} images for {} domain vertices",
                self.image.len(),
                self.domain.num_vertices()
            )));
        }
        for &w in &self.image {
            ambient.check_vertex(w)?;
        }
        for c in 0..self.domain.num_chambers() as u32 {
            let img = self.chamber_image(c);
            if !ambient.spans_simplex(&img) {
                return Err(Error::InvalidMap(format!("chamber {c} maps to {img:?}, not a simplex")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Images of the vertices of chamber `c`, in the chamber's vertex order.
    pub fn chamber_image(&self, c: ChamberId) -> FaceKey {
        self.domain.chamber(c).iter().map(|&v| self.image[v as usize]).collect()
    }

    pub fn is_collapsed(&self, c: ChamberId) -> bool {
        let img = self.chamber_image(c);
        (0..img.len()).any(|i| img[i + 1..].contains(&img[i]))
    }

    /// Number of non-collapsed chambers.
    pub fn volume(&self) -> usize {
        (0..self.domain.num_chambers() as u32).filter(|&c| !self.is_collapsed(c)).count()
    }

    /// Vertices of non-collapsed chambers (M_Vol), ascending.
    pub fn volume_vertices(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = (0..self.domain.num_chambers() as u32)
            .filter(|&c| !self.is_collapsed(c))
            .flat_map(|c| self.domain.chamber(c).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distinct ambient image vertices, ascending.
    pub fn image_vertices(&self) -> Vec<VertexId> {
        let mut v = self.image.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Largest ambient distance between two image vertices.
    pub fn diameter(&self, metric: &Metric) -> u32 {
        let verts = self.image_vertices();
        verts
            .iter()
            .map(|&u| {
                let row = metric.row(u);
                verts.iter().map(|&v| row[v as usize]).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Oriented image chain using the given domain chamber signs.
    pub fn image_chain(&self, signs: &[i8]) -> Chain {
        let mut z = Chain::default();
        for c in 0..self.domain.num_chambers() as u32 {
            z.add_oriented(&self.chamber_image(c), signs[c as usize] as i64);
        }
        z
    }
}

/// Topological type of a hypersurface domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceModel {
    Sphere,
    Surface(u32),
    /// Disjoint union of closed manifolds (remainders of a partition).
    Union(u32),
}

/// A map from a closed k-manifold complex.
#[derive(Clone, Debug)]
pub struct Hypersurface {
    pub map: SimplicialMap,
    pub model: SurfaceModel,
}

impl Hypersurface {
    pub fn new(map: SimplicialMap, model: SurfaceModel) -> Result<Self> {
        check_closed_manifold(&map.domain)?;
        let comps = map.domain.chamber_components().len() as u32;
        match model {
            SurfaceModel::Sphere | SurfaceModel::Surface(_) if comps != 1 => {
                return Err(Error::NotManifold(format!("{comps} components for a connected model")));
            }
            SurfaceModel::Sphere if map.dim() == 2 && map.domain.euler_characteristic() != 2 => {
                return Err(Error::NotManifold("sphere model with Euler characteristic != 2".into()));
            }
            SurfaceModel::Surface(g) if map.dim() == 2 && map.domain.euler_characteristic() != 2 - 2 * g as i64 => {
                return Err(Error::NotManifold(format!("genus {g} model with wrong Euler characteristic")));
            }
            _ => {}
        }
        Ok(Self { map, model })
    }

    /// Classifies a closed manifold domain by components and Euler characteristic.
    pub fn infer(map: SimplicialMap) -> Result<Self> {
        check_closed_manifold(&map.domain)?;
        let comps = map.domain.chamber_components().len() as u32;
        let model = if comps != 1 {
            SurfaceModel::Union(comps)
        } else if map.dim() == 2 {
            let chi = map.domain.euler_characteristic();
            if chi == 2 {
                SurfaceModel::Sphere
            } else {
                SurfaceModel::Surface(((2 - chi) / 2).max(0) as u32)
            }
        } else {
            SurfaceModel::Sphere
        };
        Ok(Self { map, model })
    }

    pub fn k(&self) -> usize {
        self.map.dim()
    }

    pub fn volume(&self) -> usize {
        self.map.volume()
    }

    pub fn diameter(&self, metric: &Metric) -> u32 {
        self.map.diameter(metric)
    }

    /// `diam <= eta * Vol^(1/k)`, with the volume-zero conventions.
    pub fn is_round(&self, metric: &Metric, eta: f64) -> bool {
        let vol = self.volume();
        let diam = self.diameter(metric);
        if vol == 0 {
            return diam == 0;
        }
        diam as f64 <= eta * (vol as f64).powf(1.0 / self.k() as f64) + 1e-9
    }

    /// Consistent domain orientation; errors when not orientable.
    pub fn orientation(&self) -> Result<Vec<i8>> {
        orient_chambers(&self.map.domain).ok_or_else(|| Error::NotManifold("domain is not orientable".into()))
    }

    /// Fundamental cycle pushed into the ambient complex.
    pub fn image_cycle(&self) -> Result<Chain> {
        Ok(self.map.image_chain(&self.orientation()?))
    }

    pub fn to_hsf(&self) -> String {
        let mut s = String::new();
        match self.model {
            SurfaceModel::Sphere => writeln!(s, "model sphere k {}", self.k()),
            SurfaceModel::Surface(g) => writeln!(s, "model surface {g} k {}", self.k()),
            SurfaceModel::Union(n) => writeln!(s, "model union {n} k {}", self.k()),
        }
        .unwrap();
        s += &self.map.domain.to_scx();
        for (v, w) in self.map.image.iter().enumerate() {
            writeln!(s, "m {v} {w}").unwrap();
        }
        s
    }

    /// Parses .hsf text; the map is validated against `ambient`.
    pub fn parse_hsf(text: &str, origin: &str, ambient: &SimplicialComplex) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.split('#').next().unwrap_or("").trim();
            !t.is_empty()
        });
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(origin, 0, "empty file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let (model, k) = match toks.as_slice() {
            ["model", "sphere", "k", k] => (SurfaceModel::Sphere, *k),
            ["model", "surface", g, "k", k] => {
                (SurfaceModel::Surface(g.parse().map_err(|_| Error::parse(origin, hl + 1, "bad genus"))?), *k)
            }
            ["model", "union", n, "k", k] => {
                (SurfaceModel::Union(n.parse().map_err(|_| Error::parse(origin, hl + 1, "bad count"))?), *k)
            }
            _ => return Err(Error::parse(origin, hl + 1, "expected `model sphere|surface <g> k <k>`")),
        };
        let k: usize = k.parse().map_err(|_| Error::parse(origin, hl + 1, "bad k"))?;
        let mut scx = Vec::new();
        let mut image = HashMap::new();
        for (i, l) in lines {
            let t = l.trim();
            if let Some(rest) = t.strip_prefix("m ") {
                let nums: Vec<u32> = rest
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| Error::parse(origin, i + 1, "bad integer")))
                    .collect::<Result<_>>()?;
                if nums.len() != 2 || image.insert(nums[0], nums[1]).is_some() {
                    return Err(Error::parse(origin, i + 1, "bad or repeated map line"));
                }
            } else {
                scx.push((i, l));
            }
        }
        let domain = parse_scx_lines(scx.into_iter(), origin)?;
        if domain.dim() != k {
            return Err(Error::parse(origin, hl + 1, "k does not match the domain dimension"));
        }
        let image = (0..domain.num_vertices() as u32)
            .map(|v| image.get(&v).copied().ok_or_else(|| Error::parse(origin, 0, format!("vertex {v} has no image"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(SimplicialMap::new(domain, image, ambient)?, model)
    }

    pub fn read_hsf(path: &Path, ambient: &SimplicialComplex) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_hsf(&text, &path.display().to_string(), ambient)
    }

    pub fn write_hsf(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_hsf()).map_err(|e| Error::io(path, e))
    }
}

/// Every facet in exactly two chambers and every vertex link connected.
pub fn check_closed_manifold(cx: &SimplicialComplex) -> Result<()> {
    let mut count: HashMap<FaceKey, u32> = HashMap::new();
    for c in 0..cx.num_chambers() as u32 {
        for f in cx.facets_of(c) {
            *count.entry(f).or_insert(0) += 1;
        }
    }
    if let Some((f, n)) = count.iter().find(|(_, &n)| n != 2) {
        return Err(Error::NotManifold(format!("facet {f:?} lies in {n} chambers")));
    }
    check_vertex_links(cx)
}

/// Vertex stars are single galleries through faces containing the vertex.
pub fn check_vertex_links(cx: &SimplicialComplex) -> Result<()> {
    if cx.dim() < 2 {
        return Ok(());
    }
    for v in 0..cx.num_vertices() as u32 {
        let star = cx.star(v);
        let mut seen = HashSet::from([star[0]]);
        let mut stack = vec![star[0]];
        while let Some(c) = stack.pop() {
            for &d in cx.adjacent(c) {
                if cx.chamber(d).binary_search(&v).is_ok() && seen.insert(d) {
                    stack.push(d);
                }
            }
        }
        if seen.len() != star.len() {
            return Err(Error::NotManifold(format!("vertex {v} is a pinch point")));
        }
    }
    Ok(())
}

/// A map from a (k+1)-manifold with boundary, with the identification of its boundary.
#[derive(Clone, Debug)]
pub struct FillingDomain {
    pub map: SimplicialMap,
    /// Filling-domain vertex of each hypersurface domain vertex.
    pub boundary: Vec<VertexId>,
}

impl FillingDomain {
    pub fn volume(&self) -> usize {
        self.map.volume()
    }

    /// Checks boundary faces against `h`: same facets, same images, one chamber each.
    pub fn check_boundary(&self, h: &Hypersurface) -> Result<()> {
        let d = &self.map.domain;
        if d.dim() != h.k() + 1 {
            return Err(Error::InvalidMap("filling has the wrong dimension".into()));
        }
        if self.boundary.len() != h.map.domain.num_vertices() {
            return Err(Error::InvalidMap("boundary identification has the wrong length".into()));
        }
        let mut seen = HashSet::new();
        for (i, &b) in self.boundary.iter().enumerate() {
            if !seen.insert(b) {
                return Err(Error::InvalidMap(format!("boundary vertex {b} used twice")));
            }
            if self.map.image[b as usize] != h.map.image[i] {
                return Err(Error::InvalidMap(format!("image mismatch at boundary vertex {i}")));
            }
        }
        let mut count: HashMap<FaceKey, u32> = HashMap::new();
        for c in 0..d.num_chambers() as u32 {
            for f in d.facets_of(c) {
                *count.entry(f).or_insert(0) += 1;
            }
        }
        if count.values().any(|&n| n > 2) {
            return Err(Error::NotManifold("filling facet in more than two chambers".into()));
        }
        let mut bfaces: Vec<FaceKey> = count.into_iter().filter(|(_, n)| *n == 1).map(|(f, _)| f).collect();
        bfaces.sort_unstable();
        let mut expected: Vec<FaceKey> = h
            .map
            .domain
            .chambers()
            .map(|c| {
                let mut f: FaceKey = c.iter().map(|&v| self.boundary[v as usize]).collect();
                f.sort_unstable();
                f
            })
            .collect();
        expected.sort_unstable();
        if bfaces != expected {
            return Err(Error::InvalidMap("filling boundary differs from the hypersurface".into()));
        }
        Ok(())
    }

    /// Filling radius, measured on the image 1-skeleton (see [`skeleton_radius`]).
    pub fn radius(&self, h: &Hypersurface, metric: &Metric) -> f64 {
        let cells = self.map.domain.chambers().map(|c| c.iter().map(|&v| self.map.image[v as usize]).collect::<Vec<_>>());
        skeleton_radius(h, metric, cells)
    }
}

/// Largest distance from a point of the 1-skeleton spanned by `cells` to the image
/// 1-skeleton of `h`.
///
/// Points inside edges count: an edge off `h` whose ends sit at distances `a` and
/// `b` reaches `(a + b + 1) / 2` at its farthest point.
pub fn skeleton_radius(h: &Hypersurface, metric: &Metric, cells: impl IntoIterator<Item = Vec<VertexId>>) -> f64 {
    let d = metric.distance_to_set(&h.map.image_vertices());
    let mut on_h: HashSet<(VertexId, VertexId)> = HashSet::new();
    for c in h.map.domain.chambers() {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                let (x, y) = (h.map.image[a as usize], h.map.image[b as usize]);
                on_h.insert((x.min(y), x.max(y)));
            }
        }
    }
    let mut worst = 0.0f64;
    for c in cells {
        for (i, &a) in c.iter().enumerate() {
            let da = d[a as usize];
            if da == UNREACHABLE {
                continue;
            }
            worst = worst.max(da as f64);
            for &b in &c[i + 1..] {
                let db = d[b as usize];
                if a == b || db == UNREACHABLE || on_h.contains(&(a.min(b), a.max(b))) {
                    continue;
                }
                worst = worst.max((da + db + 1) as f64 / 2.0);
            }
        }
    }
    worst
}
