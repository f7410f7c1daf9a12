//! Pure simplicial complexes stored by their chambers, plus the 1-skeleton metric.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type ChamberId = u32;

/// Distance value standing for "not connected".
pub const UNREACHABLE: u32 = u32::MAX;

/// Sorted vertex tuple of a (small) simplex.
pub type FaceKey = SmallVec<[VertexId; 4]>;

/// A finite pure simplicial complex.
///
/// Only chambers are stored. Lower faces are found by intersecting vertex stars,
/// which keeps memory linear in the number of chambers.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    n_vertices: usize,
    cells: Vec<VertexId>,
    star_off: Vec<u32>,
    star: Vec<ChamberId>,
    adj_off: Vec<u32>,
    adj: Vec<ChamberId>,
    nbr_off: Vec<u32>,
    nbr: Vec<VertexId>,
}

fn csr(n: usize, pairs: &mut [(u32, u32)]) -> (Vec<u32>, Vec<u32>) {
    pairs.sort_unstable();
    let mut off = vec![0u32; n + 1];
    for &(a, _) in pairs.iter() {
        off[a as usize + 1] += 1;
    }
    for i in 0..n {
        off[i + 1] += off[i];
    }
    (off, pairs.iter().map(|p| p.1).collect())
}

impl SimplicialComplex {
    /// Builds a complex from its maximal simplices. The vertex count is `max id + 1`.
    pub fn from_simplices<S: AsRef<[VertexId]>>(simplices: &[S]) -> Result<Self> {
        let n = simplices
            .iter()
            .flat_map(|s| s.as_ref().iter().copied())
            .max()
            .map_or(0, |m| m as usize + 1);
        Self::with_vertex_count(n, simplices)
    }

    /// Builds a complex on vertex ids `0..n_vertices`. Every id must be used.
    pub fn with_vertex_count<S: AsRef<[VertexId]>>(n_vertices: usize, simplices: &[S]) -> Result<Self> {
        let first = simplices.first().ok_or(Error::EmptyComplex)?;
        let width = first.as_ref().len();
        if width == 0 {
            return Err(Error::EmptyComplex);
        }
        let mut cells = Vec::with_capacity(simplices.len() * width);
        let mut seen = HashSet::with_capacity(simplices.len());
        for (i, s) in simplices.iter().enumerate() {
            let s = s.as_ref();
            if s.len() != width {
                return Err(Error::NonPureComplex { index: i, found: s.len(), expected: width });
            }
            let mut key: FaceKey = s.iter().copied().collect();
            key.sort_unstable();
            if key.windows(2).any(|w| w[0] == w[1]) || !seen.insert(key.clone()) {
                return Err(Error::DuplicateSimplex(i));
            }
            for &v in &key {
                if v as usize >= n_vertices {
                    return Err(Error::InvalidVertex { id: v, count: n_vertices });
                }
            }
            cells.extend_from_slice(&key);
        }
        let dim = width - 1;
        let n_ch = simplices.len();

        let mut pairs: Vec<(u32, u32)> = cells
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i / width) as u32))
            .collect();
        let (star_off, star) = csr(n_vertices, &mut pairs);
        if let Some(v) = (0..n_vertices).find(|&v| star_off[v] == star_off[v + 1]) {
            return Err(Error::DanglingVertex(v as u32));
        }

        let mut pairs = Vec::new();
        for c in cells.chunks_exact(width) {
            for i in 0..width {
                for j in 0..width {
                    if i != j {
                        pairs.push((c[i], c[j]));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let (nbr_off, nbr) = csr(n_vertices, &mut pairs);

        let mut pairs = Vec::new();
        if dim > 0 {
            let mut by_facet: HashMap<FaceKey, SmallVec<[u32; 2]>> = HashMap::with_capacity(n_ch * width);
            for (ci, c) in cells.chunks_exact(width).enumerate() {
                for skip in 0..width {
                    let key: FaceKey = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    by_facet.entry(key).or_default().push(ci as u32);
                }
            }
            for owners in by_facet.values() {
                for &a in owners {
                    for &b in owners {
                        if a != b {
                            pairs.push((a, b));
                        }
                    }
                }
            }
        }
        let (adj_off, adj) = csr(n_ch, &mut pairs);

        Ok(Self { dim, n_vertices, cells, star_off, star, adj_off, adj, nbr_off, nbr })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn num_chambers(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    /// Sorted vertices of chamber `c`.
    pub fn chamber(&self, c: ChamberId) -> &[VertexId] {
        let w = self.dim + 1;
        &self.cells[c as usize * w..(c as usize + 1) * w]
    }

    pub fn chambers(&self) -> impl Iterator<Item = &[VertexId]> + '_ {
        self.cells.chunks_exact(self.dim + 1)
    }

    /// Chambers containing vertex `v`, ascending.
    pub fn star(&self, v: VertexId) -> &[ChamberId] {
        &self.star[self.star_off[v as usize] as usize..self.star_off[v as usize + 1] as usize]
    }

    /// 1-skeleton neighbours of `v`, ascending.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.nbr[self.nbr_off[v as usize] as usize..self.nbr_off[v as usize + 1] as usize]
    }

    /// Chambers sharing a codimension-1 face with `c`.
    pub fn adjacent(&self, c: ChamberId) -> &[ChamberId] {
        &self.adj[self.adj_off[c as usize] as usize..self.adj_off[c as usize + 1] as usize]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.n_vertices {
            Ok(())
        } else {
            Err(Error::InvalidVertex { id: v, count: self.n_vertices })
        }
    }

    /// Chambers containing every vertex of `face` (the face index lookup).
    pub fn chambers_containing(&self, face: &[VertexId]) -> Vec<ChamberId> {
        let Some((&first, rest)) = face.split_first() else {
            return (0..self.num_chambers() as u32).collect();
        };
        if first as usize >= self.n_vertices {
            return Vec::new();
        }
        self.star(first)
            .iter()
            .copied()
            .filter(|&c| {
                let ch = self.chamber(c);
                rest.iter().all(|v| ch.binary_search(v).is_ok())
            })
            .collect()
    }

    /// Whether the vertex set `face` (any order, duplicates allowed) spans a simplex.
    pub fn spans_simplex(&self, face: &[VertexId]) -> bool {
        let mut key: FaceKey = face.iter().copied().collect();
        key.sort_unstable();
        key.dedup();
        if key.len() > self.dim + 1 {
            return false;
        }
        match key.as_slice() {
            [] => true,
            [v] => (*v as usize) < self.n_vertices,
            [a, b] => (*a as usize) < self.n_vertices && self.neighbors(*a).binary_search(b).is_ok(),
            _ => {
                let (first, rest) = key.split_first().unwrap();
                (*first as usize) < self.n_vertices
                    && self.star(*first).iter().any(|&c| {
                        let ch = self.chamber(c);
                        rest.iter().all(|v| ch.binary_search(v).is_ok())
                    })
            }
        }
    }

    /// The chamber with exactly these vertices, if any.
    pub fn find_chamber(&self, verts: &[VertexId]) -> Option<ChamberId> {
        let mut key: FaceKey = verts.iter().copied().collect();
        key.sort_unstable();
        if key.len() != self.dim + 1 || key[0] as usize >= self.n_vertices {
            return None;
        }
        self.star(key[0]).iter().copied().find(|&c| self.chamber(c) == key.as_slice())
    }

    /// All `d`-dimensional faces, sorted.
    pub fn faces(&self, d: usize) -> Vec<FaceKey> {
        let mut out = HashSet::new();
        let w = self.dim + 1;
        if d >= w {
            return Vec::new();
        }
        for c in self.chambers() {
            for mask in 0u32..(1 << w) {
                if mask.count_ones() as usize == d + 1 {
                    let key: FaceKey = (0..w).filter(|i| mask >> i & 1 == 1).map(|i| c[i]).collect();
                    out.insert(key);
                }
            }
        }
        let mut v: Vec<FaceKey> = out.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Codimension-1 faces of `c`, the i-th omitting the i-th vertex.
    pub fn facets_of(&self, c: ChamberId) -> impl Iterator<Item = FaceKey> + '_ {
        let ch = self.chamber(c);
        (0..ch.len()).map(move |skip| facet_key(ch, skip))
    }

    /// Codimension-1 faces lying in exactly one chamber, with that chamber.
    pub fn boundary_facets(&self) -> Vec<(FaceKey, ChamberId)> {
        let mut count: HashMap<FaceKey, (u32, ChamberId)> = HashMap::new();
        for c in 0..self.num_chambers() as u32 {
            for f in self.facets_of(c) {
                let e = count.entry(f).or_insert((0, c));
                e.0 += 1;
            }
        }
        let mut out: Vec<_> = count.into_iter().filter(|(_, (n, _))| *n == 1).map(|(f, (_, c))| (f, c)).collect();
        out.sort_unstable();
        out
    }

    /// Maximal set of `allowed` chambers reachable from `seed` through adjacency inside `allowed`.
    pub fn gallery_component(&self, seed: ChamberId, allowed: &ChamberSet) -> Result<ChamberSet> {
        if !allowed.contains(seed) {
            return Err(Error::SeedNotAllowed(seed));
        }
        let mut out = ChamberSet::new(self.num_chambers());
        out.insert(seed);
        let mut stack = vec![seed];
        while let Some(c) = stack.pop() {
            for &d in self.adjacent(c) {
                if allowed.contains(d) && !out.contains(d) {
                    out.insert(d);
                    stack.push(d);
                }
            }
        }
        Ok(out)
    }

    /// BFS distances from `src`; `UNREACHABLE` marks other components.
    pub fn bfs(&self, src: VertexId) -> Vec<u32> {
        self.bfs_multi(&[src], None)
    }

    /// BFS from several sources, optionally skipping `blocked` vertices.
    pub fn bfs_multi(&self, srcs: &[VertexId], blocked: Option<&[bool]>) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n_vertices];
        let mut queue = VecDeque::new();
        for &s in srcs {
            if blocked.is_some_and(|b| b[s as usize]) || dist[s as usize] == 0 {
                continue;
            }
            dist[s as usize] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in self.neighbors(u) {
                if dist[w as usize] == UNREACHABLE && !blocked.is_some_and(|b| b[w as usize]) {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices == 0 || self.bfs(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Number of connected components of the dual graph.
    pub fn chamber_components(&self) -> Vec<Vec<ChamberId>> {
        let n = self.num_chambers();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s as u32];
            let mut i = 0;
            while i < comp.len() {
                for &d in self.adjacent(comp[i]) {
                    if !seen[d as usize] {
                        seen[d as usize] = true;
                        comp.push(d);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Euler characteristic from all faces.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim).map(|d| if d % 2 == 0 { 1 } else { -1 } * self.faces(d).len() as i64).sum()
    }

    pub fn to_scx(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim {}", self.dim).unwrap();
        writeln!(s, "vertices {}", self.n_vertices).unwrap();
        for c in self.chambers() {
            s.push('s');
            for v in c {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Parses the .scx text format; `origin` names the source in error messages.
    pub fn parse_scx(text: &str, origin: &str) -> Result<Self> {
        parse_scx_lines(text.lines().enumerate(), origin)
    }

    pub fn read_scx(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_scx(&text, &path.display().to_string())
    }

    pub fn write_scx(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_scx()).map_err(|e| Error::io(path, e))
    }
}

/// Map from every codimension-1 face to the chambers containing it, with the omitted position.
#[derive(Clone, Debug, Default)]
pub struct FacetIndex(pub HashMap<FaceKey, SmallVec<[(ChamberId, u8); 2]>>);

impl FacetIndex {
    pub fn build(cx: &SimplicialComplex) -> Self {
        let mut map: HashMap<FaceKey, SmallVec<[(ChamberId, u8); 2]>> = HashMap::with_capacity(cx.num_chambers() * 2);
        for c in 0..cx.num_chambers() as u32 {
            for (skip, f) in cx.facets_of(c).enumerate() {
                map.entry(f).or_default().push((c, skip as u8));
            }
        }
        Self(map)
    }

    pub fn get(&self, f: &[VertexId]) -> &[(ChamberId, u8)] {
        self.0.get(f).map_or(&[], |v| v.as_slice())
    }
}

/// Sorted chamber vertices with position `skip` removed.
pub fn facet_key(ch: &[VertexId], skip: usize) -> FaceKey {
    ch.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
}

pub(crate) fn parse_scx_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    origin: &str,
) -> Result<SimplicialComplex> {
    let mut dim = None;
    let mut count = None;
    let mut simplices: Vec<Vec<u32>> = Vec::new();
    for (i, raw) in lines {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap();
        let nums: Vec<u32> = it
            .map(|t| t.parse::<u32>().map_err(|_| Error::parse(origin, i + 1, format!("bad integer {t:?}"))))
            .collect::<Result<_>>()?;
        match tag {
            "dim" if nums.len() == 1 => dim = Some(nums[0] as usize),
            "vertices" if nums.len() == 1 => count = Some(nums[0] as usize),
            "s" => {
                if nums.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse(origin, i + 1, "simplex vertices must be strictly ascending"));
                }
                if let Some(d) = dim {
                    if nums.len() != d + 1 {
                        return Err(Error::NonPureComplex { index: simplices.len(), found: nums.len(), expected: d + 1 });
                    }
                }
                simplices.push(nums);
            }
            _ => return Err(Error::parse(origin, i + 1, format!("unexpected line {line:?}"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::parse(origin, 0, "missing `dim` line"))?;
    let count = count.ok_or_else(|| Error::parse(origin, 0, "missing `vertices` line"))?;
    let cx = SimplicialComplex::with_vertex_count(count, &simplices)?;
    if cx.dim() != dim {
        return Err(Error::parse(origin, 0, format!("declared dim {dim}, simplices have dim {}", cx.dim())));
    }
    Ok(cx)
}

/// Bitset over chamber ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberSet(FixedBitSet);

impl ChamberSet {
    pub fn new(n_chambers: usize) -> Self {
        Self(FixedBitSet::with_capacity(n_chambers))
    }

    pub fn full(n_chambers: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(n_chambers);
        b.insert_range(..);
        Self(b)
    }

    pub fn from_ids(n_chambers: usize, ids: impl IntoIterator<Item = ChamberId>) -> Self {
        let mut s = Self::new(n_chambers);
        for c in ids {
            s.insert(c);
        }
        s
    }

    pub fn insert(&mut self, c: ChamberId) {
        self.0.insert(c as usize);
    }

    pub fn remove(&mut self, c: ChamberId) {
        self.0.set(c as usize, false);
    }

    pub fn contains(&self, c: ChamberId) -> bool {
        self.0.contains(c as usize)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ChamberId> + '_ {
        self.0.ones().map(|c| c as u32)
    }

    pub fn is_subset(&self, other: &ChamberSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &ChamberSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union_with(&mut self, other: &ChamberSet) {
        self.0.union_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &ChamberSet) {
        self.0.difference_with(&other.0);
    }

    pub fn complement(&self) -> ChamberSet {
        let mut b = self.0.clone();
        b.toggle_range(..);
        Self(b)
    }
}

/// Default vertex-count cap under which every requested BFS row stays cached.
pub const DEFAULT_ALL_PAIRS_CAP: usize = 20_000;
const SMALL_CACHE_ROWS: usize = 64;

/// Memoized 1-skeleton shortest-path metric. Safe to share between threads.
#[derive(Debug)]
pub struct Metric {
    complex: Arc<SimplicialComplex>,
    rows: Mutex<HashMap<VertexId, Arc<[u32]>>>,
    cap: usize,
}

impl Metric {
    pub fn new(complex: Arc<SimplicialComplex>) -> Self {
        Self::with_cap(complex, DEFAULT_ALL_PAIRS_CAP)
    }

    pub fn with_cap(complex: Arc<SimplicialComplex>, cap: usize) -> Self {
        Self { complex, rows: Mutex::new(HashMap::new()), cap }
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    /// BFS row from `src`, cached. Above the cap only a small number of rows is kept.
    pub fn row(&self, src: VertexId) -> Arc<[u32]> {
        if let Some(r) = self.rows.lock().unwrap().get(&src) {
            return r.clone();
        }
        let row: Arc<[u32]> = self.complex.bfs(src).into();
        let mut rows = self.rows.lock().unwrap();
        if self.complex.num_vertices() > self.cap && rows.len() >= SMALL_CACHE_ROWS {
            rows.clear();
        }
        rows.insert(src, row.clone());
        row
    }

    /// Distance between `u` and `v`, `None` when disconnected.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        let d = self.row(u)[v as usize];
        (d != UNREACHABLE).then_some(d)
    }

    /// Closed ball `{v : dist(center, v) <= r}`; empty when `r < 0`.
    pub fn ball(&self, center: VertexId, r: i64) -> Vec<VertexId> {
        if r < 0 {
            return Vec::new();
        }
        let row = self.row(center);
        (0..row.len() as u32).filter(|&v| row[v as usize] != UNREACHABLE && row[v as usize] as i64 <= r).collect()
    }

    /// Distance from every vertex to the nearest vertex of `set`.
    pub fn distance_to_set(&self, set: &[VertexId]) -> Vec<u32> {
        self.complex.bfs_multi(set, None)
    }

    /// Fills the full table, loading it from `FILLAB_CACHE` when a matching file exists.
    pub fn precompute_all_pairs(&self) -> Result<()> {
        let n = self.complex.num_vertices();
        if n > self.cap {
            return Ok(());
        }
        let cache = std::env::var_os("FILLAB_CACHE").map(std::path::PathBuf::from);
        let file = cache.as_ref().map(|dir| dir.join(format!("{:016x}.apsp", self.fingerprint())));
        if let Some(f) = file.as_ref().filter(|f| f.exists()) {
            let bytes = std::fs::read(f).map_err(|e| Error::io(f, e))?;
            if bytes.len() == n * n * 4 {
                let mut rows = self.rows.lock().unwrap();
                for (v, chunk) in bytes.chunks_exact(n * 4).enumerate() {
                    let row: Vec<u32> = chunk.chunks_exact(4).map(|b| u32::from_le_bytes(b.try_into().unwrap())).collect();
                    rows.insert(v as u32, row.into());
                }
                return Ok(());
            }
        }
        let mut bytes = Vec::with_capacity(n * n * 4);
        for v in 0..n as u32 {
            for d in self.row(v).iter() {
                bytes.extend_from_slice(&d.to_le_bytes());
            }
        }
        if let (Some(dir), Some(f)) = (cache, file) {
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            std::fs::write(&f, bytes).map_err(|e| Error::io(&f, e))?;
        }
        Ok(())
    }

    fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.complex.dim.hash(&mut h);
        self.complex.cells.hash(&mut h);
        h.finish()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn octahedron() -> SimplicialComplex {
        // 0,1 = ±x; 2,3 = ±y; 4,5 = ±z
        let mut t = Vec::new();
        for &x in &[0u32, 1] {
            for &y in &[2u32, 3] {
                for &z in &[4u32, 5] {
                    t.push(vec![x, y, z]);
                }
            }
        }
        SimplicialComplex::from_simplices(&t).unwrap()
    }

    #[test]
    fn single_triangle() {
        let c = SimplicialComplex::from_simplices(&[[0, 1, 2]]).unwrap();
        assert_eq!(c.num_chambers(), 1);
        assert_eq!(c.faces(1).len(), 3);
        assert_eq!(c.num_vertices(), 3);
    }

    #[test]
    fn octahedron_counts() {
        let c = octahedron();
        assert_eq!(c.num_chambers(), 8);
        assert_eq!(c.faces(1).len(), 12);
        for ch in 0..8 {
            assert_eq!(c.adjacent(ch).len(), 3);
        }
        assert_eq!(c.euler_characteristic(), 2);
        assert!(c.boundary_facets().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let mixed: Vec<Vec<u32>> = vec![vec![0, 1, 2], vec![2, 3]];
        assert!(matches!(SimplicialComplex::from_simplices(&mixed), Err(Error::NonPureComplex { .. })));
        assert!(matches!(
            SimplicialComplex::with_vertex_count(5, &[[0, 1, 2]]),
            Err(Error::DanglingVertex(3))
        ));
        assert!(matches!(
            SimplicialComplex::from_simplices(&[[0, 1, 2], [2, 1, 0]]),
            Err(Error::DuplicateSimplex(1))
        ));
    }

    #[test]
    fn octahedron_distances() {
        let c = Arc::new(octahedron());
        let m = Metric::new(c);
        assert_eq!(m.distance(0, 1), Some(2));
        assert_eq!(m.distance(0, 2), Some(1));
        assert_eq!(m.distance(3, 3), Some(0));
    }

    #[test]
    fn galleries_on_octahedron() {
        let c = octahedron();
        let all = ChamberSet::full(8);
        assert_eq!(c.gallery_component(0, &all).unwrap().len(), 8);
        let only = ChamberSet::from_ids(8, [0]);
        assert_eq!(c.gallery_component(0, &only).unwrap(), only);
        // chamber 0 = {0,2,4}, chamber 7 = {1,3,5} share no vertex
        let pair = ChamberSet::from_ids(8, [0, 7]);
        assert_eq!(c.gallery_component(0, &pair).unwrap().iter().collect::<Vec<_>>(), vec![0]);
        assert!(matches!(c.gallery_component(3, &pair), Err(Error::SeedNotAllowed(3))));
    }

    #[test]
    fn balls() {
        let m = Metric::new(Arc::new(octahedron()));
        assert!(m.ball(0, -1).is_empty());
        assert_eq!(m.ball(0, 0), vec![0]);
        assert_eq!(m.ball(0, 1).len(), 5);
        assert_eq!(m.ball(0, 2).len(), 6);
    }

    #[test]
    fn scx_roundtrip() {
        let c = octahedron();
        let text = c.to_scx();
        let back = SimplicialComplex::parse_scx(&format!("# header\n{text}"), "mem").unwrap();
        assert_eq!(back.to_scx(), text);
        assert!(SimplicialComplex::parse_scx("dim 2\nvertices 3\ns 0 2 1\n", "mem").is_err());
        assert!(SimplicialComplex::parse_scx("dim 2\nvertices 3\ns 0 1\n", "mem").is_err());
    }

    #[test]
    fn spans() {
        let c = octahedron();
        assert!(c.spans_simplex(&[0, 2, 4]));
        assert!(c.spans_simplex(&[4, 0, 0]));
        assert!(!c.spans_simplex(&[0, 1]));
        assert!(!c.spans_simplex(&[0, 2, 3]));
        assert_eq!(c.find_chamber(&[4, 2, 0]), Some(0));
    }
}
