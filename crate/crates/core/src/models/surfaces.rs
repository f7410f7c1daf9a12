//! Test hypersurfaces with known ground truth: grid loops, box and polycube spheres, dumbbells.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::hypersurface::{Hypersurface, SimplicialMap, SurfaceModel};

use super::Model;

type P = [i32; 3];

fn add(p: P, q: P) -> P {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

fn lattice_vertex(model: &Model, p: P) -> Result<VertexId> {
    let v = model.vertex_at(p).map_err(|_| Error::EscapesMargin(u32::MAX))?;
    model.margin.check([v])?;
    Ok(v)
}

/// Grid geodesic from `a` to `b` (both included).
pub fn grid_path(a: P, b: P) -> Vec<P> {
    let mut out = vec![a];
    let mut p = a;
    while p != b {
        let d = [b[0] - p[0], b[1] - p[1], b[2] - p[2]];
        let step = if d.iter().any(|&x| x > 0) { d.map(|x| (x > 0) as i32) } else { d.map(|x| -((x < 0) as i32)) };
        p = add(p, step);
        out.push(p);
    }
    out
}

/// Closed loop through `waypoints`, joined by grid geodesics.
pub fn polygon_loop(model: &Model, waypoints: &[P]) -> Result<Hypersurface> {
    let mut pts: Vec<P> = Vec::new();
    for i in 0..waypoints.len() {
        let seg = grid_path(waypoints[i], waypoints[(i + 1) % waypoints.len()]);
        pts.extend_from_slice(&seg[..seg.len() - 1]);
    }
    if pts.len() < 3 {
        return Err(Error::Degenerate("loop needs at least 3 edges".into()));
    }
    let image = pts.iter().map(|&p| lattice_vertex(model, p)).collect::<Result<Vec<_>>>()?;
    let n = image.len() as u32;
    let edges: Vec<[u32; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
    let domain = SimplicialComplex::from_simplices(&edges)?;
    Hypersurface::new(SimplicialMap::new(domain, image, &model.complex)?, SurfaceModel::Sphere)
}

/// Square loop of side `side` with lower-left corner `corner`, counterclockwise.
pub fn square_loop(model: &Model, corner: VertexId, side: u32) -> Result<Hypersurface> {
    rectangle_loop(model, corner, side, side)
}

pub fn rectangle_loop(model: &Model, corner: VertexId, w: u32, h: u32) -> Result<Hypersurface> {
    if w == 0 || h == 0 {
        return Err(Error::Degenerate("zero side length".into()));
    }
    let o = model.point(corner).ok_or(Error::UnsupportedAmbient)?;
    let (w, h) = (w as i32, h as i32);
    polygon_loop(model, &[o, add(o, [w, 0, 0]), add(o, [w, h, 0]), add(o, [0, h, 0])])
}

/// Boundary of a union of unit cubes, each square split along its main diagonal.
pub fn polycube_sphere(model: &Model, cells: &BTreeSet<P>) -> Result<Hypersurface> {
    surface_from_lattice(model, &polycube_triangles(cells), SurfaceModel::Sphere)
}

fn polycube_triangles(cells: &BTreeSet<P>) -> Vec<[P; 3]> {
    let mut tris = Vec::new();
    for &c in cells {
        for axis in 0..3 {
            for side in [0, 1] {
                let mut n = c;
                n[axis] += if side == 0 { -1 } else { 1 };
                if cells.contains(&n) {
                    continue;
                }
                let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
                let (a, b) = (a.min(b), a.max(b));
                let mut p = c;
                p[axis] += side;
                let mut ea = [0; 3];
                ea[a] = 1;
                let mut eb = [0; 3];
                eb[b] = 1;
                let far = add(add(p, ea), eb);
                tris.push([p, add(p, ea), far]);
                tris.push([p, add(p, eb), far]);
            }
        }
    }
    tris
}

fn surface_from_lattice(model: &Model, tris: &[[P; 3]], kind: SurfaceModel) -> Result<Hypersurface> {
    let mut ids: BTreeMap<P, u32> = BTreeMap::new();
    for t in tris {
        for &p in t {
            ids.insert(p, 0);
        }
    }
    for (i, v) in ids.values_mut().enumerate() {
        *v = i as u32;
    }
    let image = ids.keys().map(|&p| lattice_vertex(model, p)).collect::<Result<Vec<_>>>()?;
    let simplices: Vec<[u32; 3]> = tris.iter().map(|t| t.map(|p| ids[&p])).collect();
    let domain = SimplicialComplex::from_simplices(&simplices)?;
    Hypersurface::new(SimplicialMap::new(domain, image, &model.complex)?, kind)
}

fn box_cells(o: P, dims: [u32; 3]) -> BTreeSet<P> {
    let mut cells = BTreeSet::new();
    for x in 0..dims[0] as i32 {
        for y in 0..dims[1] as i32 {
            for z in 0..dims[2] as i32 {
                cells.insert(add(o, [x, y, z]));
            }
        }
    }
    cells
}

/// Boundary of the `side`-cube with minimal corner `corner`: 12 side² triangles.
pub fn boundary_sphere(model: &Model, corner: VertexId, side: u32) -> Result<Hypersurface> {
    if side == 0 {
        return Err(Error::Degenerate("zero side length".into()));
    }
    let o = model.point(corner).ok_or(Error::UnsupportedAmbient)?;
    polycube_sphere(model, &box_cells(o, [side; 3]))
}

/// A boundary sphere with isolated unit bumps and dents; returns the sphere and its enclosed cell count.
pub fn perturbed_sphere(model: &Model, corner: VertexId, side: u32, seed: u64) -> Result<(Hypersurface, usize)> {
    if side < 5 {
        return Err(Error::Degenerate("perturbed spheres need side >= 5".into()));
    }
    let o = model.point(corner).ok_or(Error::UnsupportedAmbient)?;
    let mut cells = box_cells(o, [side; 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = side as i32;
    // candidate face squares away from the box edges, as (axis, side, u, v)
    let mut candidates = Vec::new();
    for axis in 0..3 {
        for hi in [false, true] {
            for u in 2..s - 2 {
                for v in 2..s - 2 {
                    candidates.push((axis, hi, u, v));
                }
            }
        }
    }
    candidates.shuffle(&mut rng);
    let wanted = rng.gen_range(1..=8usize);
    let mut taken: Vec<(usize, bool, i32, i32)> = Vec::new();
    for &(axis, hi, u, v) in &candidates {
        if taken.len() == wanted {
            break;
        }
        if taken.iter().any(|&(a, h, tu, tv)| a == axis && h == hi && (tu - u).abs() < 2 && (tv - v).abs() < 2) {
            continue;
        }
        taken.push((axis, hi, u, v));
        let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut cell = o;
        cell[a] += u;
        cell[b] += v;
        let outward = rng.gen_bool(0.5);
        cell[axis] += match (hi, outward) {
            (false, true) => -1,
            (false, false) => 0,
            (true, true) => s,
            (true, false) => s - 1,
        };
        if outward {
            cells.insert(cell);
        } else {
            cells.remove(&cell);
        }
    }
    let h = polycube_sphere(model, &cells)?;
    Ok((h, cells.len()))
}

/// Shape of a dumbbell bulb.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BulbShape {
    /// Box surface with the given cell dimensions.
    Box([u32; 3]),
    /// Boundary of one ambient tetrahedron (4 triangles).
    Tetra,
}

impl BulbShape {
    /// Triangles relative to the placement origin, and the in/out attachment offsets.
    fn layout(self) -> (Vec<[P; 3]>, P, P) {
        match self {
            BulbShape::Box(d) => {
                let tris = polycube_triangles(&box_cells([0; 3], d));
                (tris, [0; 3], [d[0] as i32, 0, 0])
            }
            BulbShape::Tetra => {
                let q = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]];
                let tris = vec![[q[0], q[1], q[2]], [q[0], q[1], q[3]], [q[0], q[2], q[3]], [q[1], q[2], q[3]]];
                (tris, [0; 3], [1, 1, 1])
            }
        }
    }

    pub fn volume(self) -> usize {
        self.layout().0.len()
    }

    /// Number of enclosed unit tetrahedra.
    pub fn fill_volume(self) -> usize {
        match self {
            BulbShape::Box(d) => 6 * (d[0] * d[1] * d[2]) as usize,
            BulbShape::Tetra => 1,
        }
    }

    fn span(self) -> P {
        match self {
            BulbShape::Box(d) => [d[0] as i32, d[1] as i32, d[2] as i32],
            BulbShape::Tetra => [1, 1, 1],
        }
    }
}

/// Bulbs placed along the x axis, consecutive ones joined by collapsed necks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumbbellParams {
    pub origin: [i32; 3],
    pub bulb: BulbShape,
    /// One entry per neck; `necks.len() + 1` bulbs.
    pub necks: Vec<u32>,
}

impl DumbbellParams {
    pub fn new(origin: [i32; 3], bulb: BulbShape, neck: u32) -> Self {
        Self { origin, bulb, necks: vec![neck] }
    }

    /// Placement origin of every bulb.
    fn origins(&self) -> Vec<P> {
        let (_, pin, pout) = self.bulb.layout();
        let mut out = vec![self.origin];
        for &len in &self.necks {
            let o = *out.last().unwrap();
            out.push([o[0] + pout[0] + len as i32 - pin[0], o[1] + pout[1] - pin[1], o[2] + pout[2] - pin[2]]);
        }
        out
    }

    /// Grid extent holding the construction with `margin` free cells past its far side.
    pub fn extent(&self, margin: u32) -> Vec<u32> {
        let span = self.bulb.span();
        let last = *self.origins().last().unwrap();
        (0..3).map(|i| (last[i] + span[i] + margin as i32).max(self.origin[i] + span[i] + margin as i32) as u32).collect()
    }

    /// Total number of enclosed unit tetrahedra of the bulbs.
    pub fn fill_volume(&self) -> usize {
        self.bulb.fill_volume() * (self.necks.len() + 1)
    }
}

/// Cyclic order of the link of `v` in a closed surface given by triangles.
fn link_cycle(tris: &[[u32; 3]], v: u32) -> Vec<u32> {
    let mut nbrs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for t in tris.iter().filter(|t| t.contains(&v)) {
        let o: Vec<u32> = t.iter().copied().filter(|&x| x != v).collect();
        nbrs.entry(o[0]).or_default().push(o[1]);
        nbrs.entry(o[1]).or_default().push(o[0]);
    }
    let start = *nbrs.keys().next().unwrap();
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = nbrs[&start][0];
    while cur != start {
        cycle.push(cur);
        let next = nbrs[&cur].iter().copied().find(|&x| x != prev).unwrap();
        prev = cur;
        cur = next;
    }
    cycle
}

/// Annulus triangles between cycles `a` and `b`.
fn zipper(a: &[u32], b: &[u32], out: &mut Vec<[u32; 3]>) {
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let advance_a = j == nb || (i < na && (i + 1) * nb <= (j + 1) * na);
        if advance_a {
            out.push([a[i], a[(i + 1) % na], b[j % nb]]);
            i += 1;
        } else {
            out.push([a[i % na], b[j], b[(j + 1) % nb]]);
            j += 1;
        }
    }
}

/// A chain of bulbs joined by collapsed bands ("dumbbell" for two bulbs).
///
/// The star of each attachment vertex is replaced by a collar whose non-collapsed
/// triangles reproduce the star, so the total volume is that of the bulbs.
pub fn dumbbell_sphere(model: &Model, params: &DumbbellParams) -> Result<Hypersurface> {
    let (shape, pin, pout) = params.bulb.layout();
    let mut points: Vec<P> = Vec::new();
    let mut tris: Vec<[u32; 3]> = Vec::new();
    let mut attach: Vec<(Option<u32>, Option<u32>)> = Vec::new();
    let mut bulb_tris: Vec<Vec<[u32; 3]>> = Vec::new();
    for (b, origin) in params.origins().into_iter().enumerate() {
        let mut local: HashMap<P, u32> = HashMap::new();
        let mut t = Vec::new();
        for tri in &shape {
            t.push(tri.map(|p| {
                *local.entry(p).or_insert_with(|| {
                    points.push(add(origin, p));
                    points.len() as u32 - 1
                })
            }));
        }
        let a_in = (b > 0).then(|| local[&pin]);
        let a_out = (b < params.necks.len()).then(|| local[&pout]);
        attach.push((a_in, a_out));
        bulb_tris.push(t);
    }
    let mut image_pts = points.clone();
    let mut links: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for (b, t) in bulb_tris.iter().enumerate() {
        let (a_in, a_out) = attach[b];
        let li = a_in.map(|v| link_cycle(t, v)).unwrap_or_default();
        let lo = a_out.map(|v| link_cycle(t, v)).unwrap_or_default();
        if li.iter().any(|x| lo.contains(x) || Some(*x) == a_out) {
            return Err(Error::Degenerate("attachment stars overlap; use longer bulbs".into()));
        }
        tris.extend(t.iter().filter(|tri| !a_in.is_some_and(|v| tri.contains(&v)) && !a_out.is_some_and(|v| tri.contains(&v))));
        links.push((li, lo));
    }
    let new_vertex = |p: P, image_pts: &mut Vec<P>| {
        image_pts.push(p);
        image_pts.len() as u32 - 1
    };
    for (n, &len) in params.necks.iter().enumerate() {
        let from = points[attach[n].1.unwrap() as usize];
        let to = points[attach[n + 1].0.unwrap() as usize];
        let path = grid_path(from, to);
        debug_assert_eq!(path.len() as u32, len + 1);
        let l_out = &links[n].1;
        let l_in = &links[n + 1].0;
        let m = l_out.len();
        let mut rings: Vec<Vec<u32>> = Vec::new();
        for &q in &path {
            rings.push((0..m).map(|_| new_vertex(q, &mut image_pts)).collect());
        }
        zipper(l_out, &rings[0], &mut tris);
        for j in 1..rings.len() {
            zipper(&rings[j - 1], &rings[j], &mut tris);
        }
        zipper(rings.last().unwrap(), l_in, &mut tris);
    }
    // drop the removed attachment vertices and renumber
    let mut used: Vec<u32> = tris.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let rank: HashMap<u32, u32> = used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let simplices: Vec<[u32; 3]> = tris.iter().map(|t| t.map(|v| rank[&v])).collect();
    let image = used.iter().map(|&v| lattice_vertex(model, image_pts[v as usize])).collect::<Result<Vec<_>>>()?;
    let domain = SimplicialComplex::from_simplices(&simplices)?;
    Hypersurface::new(SimplicialMap::new(domain, image, &model.complex)?, SurfaceModel::Sphere)
}

/// Octahedron mapped onto the single vertex `v` (volume 0).
pub fn constant_sphere(model: &Model, v: VertexId) -> Result<Hypersurface> {
    let oct = crate::models::subdivided_octahedron(0)?;
    Hypersurface::new(SimplicialMap::new(oct, vec![v; 6], &model.complex)?, SurfaceModel::Sphere)
}

/// Several hypersurfaces of the same dimension as one map from the disjoint union.
pub fn disjoint_union(model: &Model, parts: &[Hypersurface]) -> Result<Hypersurface> {
    let mut simplices: Vec<Vec<u32>> = Vec::new();
    let mut image = Vec::new();
    for h in parts {
        let base = image.len() as u32;
        simplices.extend(h.map.domain.chambers().map(|c| c.iter().map(|&v| v + base).collect()));
        image.extend_from_slice(&h.map.image);
    }
    let domain = SimplicialComplex::from_simplices(&simplices)?;
    Hypersurface::infer(SimplicialMap::new(domain, image, &model.complex)?)
}
