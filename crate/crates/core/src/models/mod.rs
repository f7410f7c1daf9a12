//! Ambient model complexes: Freudenthal grids, subdivided octahedra and punctured grids.

mod surfaces;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::complex::{FacetIndex, Metric, SimplicialComplex, VertexId, UNREACHABLE};
use crate::error::{Error, Result};
use crate::hypersurface::orientation::orient_chambers;

pub use surfaces::{
    boundary_sphere, constant_sphere, disjoint_union, dumbbell_sphere, grid_path, perturbed_sphere, polycube_sphere,
    polygon_loop, rectangle_loop, square_loop, BulbShape, DumbbellParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Grid2,
    Grid3,
    Sphere2Subdiv,
    PuncturedGrid2,
    BallRemovedGrid3,
}

impl ModelKind {
    /// Dimension of the generated complex.
    pub fn dim(self) -> usize {
        match self {
            ModelKind::Grid2 | ModelKind::PuncturedGrid2 | ModelKind::Sphere2Subdiv => 2,
            ModelKind::Grid3 | ModelKind::BallRemovedGrid3 => 3,
        }
    }

    pub fn is_grid(self) -> bool {
        self != ModelKind::Sphere2Subdiv
    }

    fn has_removal(self) -> bool {
        matches!(self, ModelKind::PuncturedGrid2 | ModelKind::BallRemovedGrid3)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Grid2 => "grid2",
            ModelKind::Grid3 => "grid3",
            ModelKind::Sphere2Subdiv => "sphere2-subdiv",
            ModelKind::PuncturedGrid2 => "punctured-grid2",
            ModelKind::BallRemovedGrid3 => "ball-removed-grid3",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grid2" => ModelKind::Grid2,
            "grid3" => ModelKind::Grid3,
            "sphere2-subdiv" => ModelKind::Sphere2Subdiv,
            "punctured-grid2" => ModelKind::PuncturedGrid2,
            "ball-removed-grid3" => ModelKind::BallRemovedGrid3,
            _ => return Err(Error::InvalidSpec(format!("unknown model kind {s:?}"))),
        })
    }
}

/// Closed ball (grid metric) removed from a punctured model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub center: Vec<i32>,
    pub radius: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Side length in cells; subdivision rounds for `sphere2-subdiv`.
    pub size: u32,
    pub margin: u32,
    pub removal: Option<Removal>,
    /// Per-axis side lengths overriding `size` for grids.
    pub extent: Option<Vec<u32>>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, size: u32) -> Self {
        Self { kind, size, margin: 0, removal: None, extent: None }
    }

    pub fn margin(mut self, m: u32) -> Self {
        self.margin = m;
        self
    }

    pub fn removal(mut self, center: Vec<i32>, radius: u32) -> Self {
        self.removal = Some(Removal { center, radius });
        self
    }

    pub fn extent(mut self, extent: Vec<u32>) -> Self {
        self.extent = Some(extent);
        self
    }

    fn sides(&self) -> Vec<u32> {
        self.extent.clone().unwrap_or_else(|| vec![self.size; self.kind.dim()])
    }

    /// One-line header written as a comment into generated .scx files.
    pub fn header(&self) -> String {
        let mut s = format!("fillab-model {} size {} margin {}", self.kind, self.size, self.margin);
        if let Some(e) = &self.extent {
            s += &format!(" extent {}", join(e));
        }
        if let Some(r) = &self.removal {
            s += &format!(" remove {},{}", join(&r.center), r.radius);
        }
        s
    }

    pub fn parse_header(line: &str) -> Option<Self> {
        let mut it = line.split_whitespace();
        if it.next()? != "fillab-model" {
            return None;
        }
        let kind = it.next()?.parse().ok()?;
        let mut spec = ModelSpec::new(kind, 0);
        while let Some(key) = it.next() {
            let val = it.next()?;
            match key {
                "size" => spec.size = val.parse().ok()?,
                "margin" => spec.margin = val.parse().ok()?,
                "extent" => spec.extent = Some(val.split(',').map(|t| t.parse().ok()).collect::<Option<_>>()?),
                "remove" => spec.removal = Some(parse_removal(val).ok()?),
                _ => return None,
            }
        }
        Some(spec)
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses `cx,cy[,cz],r`.
pub fn parse_removal(s: &str) -> Result<Removal> {
    let nums: Vec<i32> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidSpec(format!("bad removal {s:?}"))))
        .collect::<Result<_>>()?;
    let (r, c) = nums.split_last().ok_or_else(|| Error::InvalidSpec("empty removal".into()))?;
    if *r < 0 || c.is_empty() {
        return Err(Error::InvalidSpec(format!("bad removal {s:?}")));
    }
    Ok(Removal { center: c.to_vec(), radius: *r as u32 })
}

/// Distance in the Freudenthal 1-skeleton of the infinite grid for displacement `d`.
pub fn grid_distance(d: &[i32]) -> u32 {
    let pos = d.iter().map(|&x| x.max(0)).max().unwrap_or(0);
    let neg = d.iter().map(|&x| (-x).max(0)).max().unwrap_or(0);
    (pos + neg) as u32
}

/// Per-vertex depth below the outer boundary of the patch, and the reserved band width.
#[derive(Clone, Debug)]
pub struct MarginMap {
    pub depth: Vec<u32>,
    pub band: u32,
}

impl MarginMap {
    /// Whether `v` lies in the patch minus its margin band.
    pub fn allows(&self, v: VertexId) -> bool {
        self.depth[v as usize] >= self.band
    }

    pub fn check(&self, vs: impl IntoIterator<Item = VertexId>) -> Result<()> {
        for v in vs {
            if !self.allows(v) {
                return Err(Error::EscapesMargin(v));
            }
        }
        Ok(())
    }

    /// Depth from boundary facets; closed complexes get `UNREACHABLE` everywhere.
    pub fn from_boundary(cx: &SimplicialComplex, band: u32) -> Self {
        let mut srcs: Vec<VertexId> = cx.boundary_facets().into_iter().flat_map(|(f, _)| f.into_iter()).collect();
        srcs.sort_unstable();
        srcs.dedup();
        Self { depth: cx.bfs_multi(&srcs, None), band }
    }
}

/// Integer coordinates of grid model vertices.
#[derive(Clone, Debug)]
pub struct GridCoords {
    pub points: Vec<[i32; 3]>,
    index: HashMap<[i32; 3], VertexId>,
}

impl GridCoords {
    pub fn vertex(&self, p: [i32; 3]) -> Option<VertexId> {
        self.index.get(&p).copied()
    }

    pub fn point(&self, v: VertexId) -> [i32; 3] {
        self.points[v as usize]
    }
}

/// A generated ambient complex together with its metric, margin and (for grids) coordinates.
#[derive(Debug)]
pub struct Model {
    pub spec: Option<ModelSpec>,
    pub complex: Arc<SimplicialComplex>,
    pub metric: Metric,
    pub margin: MarginMap,
    pub coords: Option<GridCoords>,
    orientation: OnceLock<Option<Vec<i8>>>,
    facets: OnceLock<FacetIndex>,
}

impl Model {
    /// Wraps an arbitrary complex; the margin is measured from its boundary facets.
    pub fn from_complex(complex: SimplicialComplex, band: u32) -> Self {
        let margin = MarginMap::from_boundary(&complex, band);
        Self::assemble(None, complex, margin, None)
    }

    fn assemble(spec: Option<ModelSpec>, complex: SimplicialComplex, margin: MarginMap, coords: Option<GridCoords>) -> Self {
        let complex = Arc::new(complex);
        Self {
            spec,
            metric: Metric::new(complex.clone()),
            complex,
            margin,
            coords,
            orientation: OnceLock::new(),
            facets: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> Option<ModelKind> {
        self.spec.as_ref().map(|s| s.kind)
    }

    /// Whether exact chain fills are available (Euclidean grid patches).
    pub fn is_grid(&self) -> bool {
        self.coords.is_some()
    }

    /// Consistent chamber orientation signs, `None` if the complex is not orientable.
    pub fn orientation(&self) -> Option<&[i8]> {
        self.orientation.get_or_init(|| orient_chambers(&self.complex)).as_deref()
    }

    /// Facet-to-chamber index, built on first use.
    pub fn facets(&self) -> &FacetIndex {
        self.facets.get_or_init(|| FacetIndex::build(&self.complex))
    }

    pub fn vertex_at(&self, p: [i32; 3]) -> Result<VertexId> {
        let coords = self.coords.as_ref().ok_or(Error::UnsupportedAmbient)?;
        coords.vertex(p).ok_or_else(|| Error::Degenerate(format!("no vertex at {p:?}")))
    }

    pub fn point(&self, v: VertexId) -> Option<[i32; 3]> {
        self.coords.as_ref().map(|c| c.point(v))
    }

    pub fn to_scx(&self) -> String {
        match &self.spec {
            Some(s) => format!("# {}\n{}", s.header(), self.complex.to_scx()),
            None => self.complex.to_scx(),
        }
    }

    pub fn write_scx(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_scx()).map_err(|e| Error::io(path, e))
    }

    /// Loads a .scx file, regenerating grid coordinates when the file carries a model header.
    pub fn read_scx(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_scx(&text, &path.display().to_string())
    }

    pub fn parse_scx(text: &str, origin: &str) -> Result<Self> {
        let complex = SimplicialComplex::parse_scx(text, origin)?;
        let spec = text
            .lines()
            .take_while(|l| l.trim_start().starts_with('#') || l.trim().is_empty())
            .find_map(|l| ModelSpec::parse_header(l.trim_start().trim_start_matches('#')));
        if let Some(spec) = spec {
            let model = generate(&spec)?;
            if model.complex.to_scx() != complex.to_scx() {
                return Err(Error::parse(origin, 1, "complex does not match its model header"));
            }
            return Ok(model);
        }
        Ok(Self::from_complex(complex, 0))
    }
}

/// Generates the ambient complex of `spec`.
pub fn generate(spec: &ModelSpec) -> Result<Model> {
    match spec.kind {
        ModelKind::Sphere2Subdiv => {
            let cx = subdivided_octahedron(spec.size)?;
            let margin = MarginMap { depth: vec![UNREACHABLE; cx.num_vertices()], band: spec.margin };
            Ok(Model::assemble(Some(spec.clone()), cx, margin, None))
        }
        kind => {
            let sides = spec.sides();
            if sides.len() != kind.dim() {
                return Err(Error::InvalidSpec(format!("{kind} needs {} extents", kind.dim())));
            }
            if sides.iter().any(|&s| s < 2) {
                return Err(Error::InvalidSpec("size must be at least 2".into()));
            }
            let removal = match (&spec.removal, kind.has_removal()) {
                (Some(r), true) => Some(r),
                (None, true) => return Err(Error::InvalidSpec(format!("{kind} needs a removal ball"))),
                (Some(_), false) => return Err(Error::InvalidSpec(format!("{kind} takes no removal ball"))),
                (None, false) => None,
            };
            if let Some(r) = removal {
                check_removal(r, &sides, spec.margin)?;
            }
            let (cx, coords) = freudenthal(&sides, removal);
            let depth = coords
                .points
                .iter()
                .map(|p| (0..sides.len()).map(|i| (p[i]).min(sides[i] as i32 - p[i]) as u32).min().unwrap())
                .collect();
            Ok(Model::assemble(Some(spec.clone()), cx, MarginMap { depth, band: spec.margin }, Some(coords)))
        }
    }
}

fn check_removal(r: &Removal, sides: &[u32], margin: u32) -> Result<()> {
    if r.center.len() < sides.len() || r.center[sides.len()..].iter().any(|&c| c != 0) {
        return Err(Error::InvalidSpec("removal center has the wrong dimension".into()));
    }
    for (i, &s) in sides.iter().enumerate() {
        let (lo, hi) = (r.center[i] - r.radius as i32, r.center[i] + r.radius as i32);
        if lo <= margin as i32 || hi >= s as i32 - margin as i32 {
            return Err(Error::RemovalOutOfBounds);
        }
    }
    Ok(())
}

/// Freudenthal triangulation of a box of unit cubes, minus the chambers meeting `removal`.
fn freudenthal(sides: &[u32], removal: Option<&Removal>) -> (SimplicialComplex, GridCoords) {
    let d = sides.len();
    let mut lattice: Vec<[i32; 3]> = Vec::new();
    let ext = |i: usize| if i < d { sides[i] as i32 } else { 0 };
    for z in 0..=ext(2) {
        for y in 0..=ext(1) {
            for x in 0..=ext(0) {
                lattice.push([x, y, z]);
            }
        }
    }
    let id = |p: [i32; 3]| (p[0] + (ext(0) + 1) * (p[1] + (ext(1) + 1) * p[2])) as usize;
    let perms: Vec<Vec<usize>> = if d == 2 { vec![vec![0, 1], vec![1, 0]] } else { permutations3() };
    let removed = |p: [i32; 3]| {
        removal.is_some_and(|r| {
            let diff: Vec<i32> = (0..d).map(|i| p[i] - r.center[i]).collect();
            grid_distance(&diff) <= r.radius
        })
    };
    let mut simplices = Vec::new();
    for z in 0..ext(2).max(1) {
        for y in 0..ext(1) {
            for x in 0..ext(0) {
                let base = [x, y, if d == 3 { z } else { 0 }];
                for perm in &perms {
                    let mut p = base;
                    let mut s = vec![p];
                    for &axis in perm {
                        p[axis] += 1;
                        s.push(p);
                    }
                    if s.iter().any(|&q| removed(q)) {
                        continue;
                    }
                    simplices.push(s);
                }
            }
        }
    }
    let mut used = vec![u32::MAX; lattice.len()];
    let mut points = Vec::new();
    let mut out = Vec::with_capacity(simplices.len());
    for s in &simplices {
        let mut t = Vec::with_capacity(d + 1);
        for &p in s {
            let slot = &mut used[id(p)];
            if *slot == u32::MAX {
                *slot = points.len() as u32;
                points.push(p);
            }
            t.push(*slot);
        }
        out.push(t);
    }
    // renumber so that vertex ids follow lattice order
    let mut order: Vec<u32> = (0..points.len() as u32).collect();
    order.sort_by_key(|&v| id(points[v as usize]));
    let mut rank = vec![0u32; points.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v as usize] = r as u32;
    }
    let points: Vec<[i32; 3]> = order.iter().map(|&v| points[v as usize]).collect();
    let out: Vec<Vec<u32>> = out.into_iter().map(|t| t.into_iter().map(|v| rank[v as usize]).collect()).collect();
    let index = points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let cx = SimplicialComplex::with_vertex_count(points.len(), &out).expect("grid generator emits a valid complex");
    (cx, GridCoords { points, index })
}

fn permutations3() -> Vec<Vec<usize>> {
    vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]]
}

/// Octahedron with `rounds` of edge-midpoint subdivision.
pub fn subdivided_octahedron(rounds: u32) -> Result<SimplicialComplex> {
    if rounds > 8 {
        return Err(Error::InvalidSpec("at most 8 subdivision rounds".into()));
    }
    let mut tris: Vec<[u32; 3]> = Vec::new();
    for &x in &[0u32, 1] {
        for &y in &[2u32, 3] {
            for &z in &[4u32, 5] {
                tris.push([x, y, z]);
            }
        }
    }
    let mut n = 6u32;
    for _ in 0..rounds {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                n += 1;
                n - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let (ab, bc, ca) = (midpoint(a, b), midpoint(b, c), midpoint(c, a));
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        tris = next;
    }
    SimplicialComplex::from_simplices(&tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_counts() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 4)).unwrap();
        assert_eq!(m.complex.num_chambers(), 32);
        assert_eq!(m.complex.num_vertices(), 25);
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 2)).unwrap();
        assert_eq!(m.complex.num_chambers(), 48);
        let m = generate(&ModelSpec::new(ModelKind::Sphere2Subdiv, 0)).unwrap();
        assert_eq!(m.complex.num_chambers(), 8);
        let m = generate(&ModelSpec::new(ModelKind::Sphere2Subdiv, 2)).unwrap();
        assert_eq!(m.complex.num_chambers(), 8 * 16);
        assert_eq!(m.complex.euler_characteristic(), 2);
    }

    #[test]
    fn grid_metric_matches_formula() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 8)).unwrap();
        let a = m.vertex_at([0, 0, 0]).unwrap();
        let b = m.vertex_at([8, 8, 0]).unwrap();
        assert_eq!(m.metric.distance(a, b), Some(8));
        let c = m.vertex_at([8, 0, 0]).unwrap();
        let d = m.vertex_at([0, 8, 0]).unwrap();
        assert_eq!(m.metric.distance(c, d), Some(16));
        let center = m.vertex_at([4, 4, 0]).unwrap();
        assert_eq!(m.metric.ball(center, 1).len(), 7);
        assert_eq!(m.complex.neighbors(center).len(), 6);
        let m3 = generate(&ModelSpec::new(ModelKind::Grid3, 3)).unwrap();
        for u in 0..m3.complex.num_vertices() as u32 {
            for v in 0..m3.complex.num_vertices() as u32 {
                let (p, q) = (m3.point(u).unwrap(), m3.point(v).unwrap());
                let diff = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
                assert_eq!(m3.metric.distance(u, v), Some(grid_distance(&diff)));
            }
        }
    }

    #[test]
    fn margins_are_lipschitz() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 4).margin(1)).unwrap();
        for v in 0..m.complex.num_vertices() as u32 {
            for &w in m.complex.neighbors(v) {
                assert!(m.margin.depth[v as usize].abs_diff(m.margin.depth[w as usize]) <= 1);
            }
        }
        assert_eq!(m.margin.depth[0], 0);
    }

    #[test]
    fn removal_bounds() {
        let spec = ModelSpec::new(ModelKind::PuncturedGrid2, 8).margin(1).removal(vec![4, 4], 1);
        let m = generate(&spec).unwrap();
        assert!(m.coords.as_ref().unwrap().vertex([4, 4, 0]).is_none());
        assert_eq!(m.complex.num_chambers(), 128 - 24);
        let bad = ModelSpec::new(ModelKind::PuncturedGrid2, 8).margin(3).removal(vec![4, 4], 1);
        assert!(matches!(generate(&bad), Err(Error::RemovalOutOfBounds)));
        let m = generate(&ModelSpec::new(ModelKind::BallRemovedGrid3, 7).margin(1).removal(vec![3, 3, 3], 0)).unwrap();
        assert_eq!(m.complex.num_chambers(), 6 * 343 - 24);
        assert!(generate(&ModelSpec::new(ModelKind::Grid2, 1)).is_err());
    }

    #[test]
    fn header_roundtrip() {
        let spec = ModelSpec::new(ModelKind::BallRemovedGrid3, 7).margin(1).removal(vec![3, 3, 3], 1);
        let m = generate(&spec).unwrap();
        let back = Model::parse_scx(&m.to_scx(), "mem").unwrap();
        assert_eq!(back.spec, Some(spec));
        assert!(back.is_grid());
    }

    #[test]
    fn grids_are_orientable() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 2)).unwrap();
        assert!(m.orientation().is_some());
    }
}
