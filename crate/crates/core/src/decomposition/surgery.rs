//! Cutting chamber regions out of a piece and capping the cut circles with disks.

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::complex::{ChamberId, ChamberSet, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::filling::{bfs_tree, cone_fill};
use crate::hypersurface::{cut, FillingDomain, Hypersurface, SimplicialMap, SurfaceModel};
use crate::models::Model;

use super::{Cap, ChamberOrigin, Piece};

// most apices tried per cap
const CAP_APICES: usize = 16;

/// Cheapest cone disk over a closed loop of ambient vertices.
///
/// Apices are taken from the loop image; ties go to the lowest vertex id.
pub(crate) fn cap_disk(model: &Model, loop_image: &[VertexId]) -> Result<FillingDomain> {
    let m = loop_image.len();
    if m < 3 {
        return Err(Error::Degenerate(format!("cut circle with {m} vertices")));
    }
    let edges: Vec<[u32; 2]> = (0..m as u32).map(|j| [j, (j + 1) % m as u32]).collect();
    let cx = SimplicialComplex::with_vertex_count(m, &edges)?;
    let h = Hypersurface::new(SimplicialMap::new(cx, loop_image.to_vec(), &model.complex)?, SurfaceModel::Sphere)?;
    let mut apices = h.map.image_vertices();
    if apices.len() > CAP_APICES {
        let n = apices.len();
        apices = (0..CAP_APICES).map(|i| apices[i * n / CAP_APICES]).collect();
    }
    apices
        .par_iter()
        .filter_map(|&a| {
            let comb = bfs_tree(&model.complex, a).ok()?;
            cone_fill(model, &h, &comb).ok().map(|d| (d.volume(), a, d))
        })
        .min_by_key(|(v, a, _)| (*v, *a))
        .map(|(_, _, d)| d)
        .ok_or(Error::CapFillUnavailable)
}

/// A chamber list under construction, on scratch vertex ids.
struct Raw {
    image: Vec<VertexId>,
    cells: Vec<(SmallVec<[u32; 4]>, ChamberOrigin)>,
}

impl Raw {
    fn fresh(&mut self, w: VertexId) -> u32 {
        self.image.push(w);
        self.image.len() as u32 - 1
    }

    /// Adds a cap disk: boundary vertex j goes to `rim[j]`, interior vertices are new.
    fn glue_cap(&mut self, cap: &Cap, id: u32, rim: &[u32]) {
        let disk = &cap.disk;
        let mut ids: Vec<Option<u32>> = vec![None; disk.map.domain.num_vertices()];
        for (j, &b) in disk.boundary.iter().enumerate() {
            ids[b as usize] = Some(rim[j]);
        }
        for (u, slot) in ids.iter_mut().enumerate() {
            if slot.is_none() {
                *slot = Some(self.fresh(disk.map.image[u]));
            }
        }
        for (c, ch) in disk.map.domain.chambers().enumerate() {
            let verts: SmallVec<[u32; 4]> = ch.iter().map(|&u| ids[u as usize].unwrap()).collect();
            self.cells.push((verts, ChamberOrigin { cap: Some(id), chamber: c as ChamberId, verts: ch.to_vec() }));
        }
    }

    /// Renumbers into pieces, one per component when `split`.
    fn finish(self, model: &Model, split: bool) -> Result<Vec<Piece>> {
        if self.cells.is_empty() {
            return Ok(Vec::new());
        }
        let n = self.image.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        if split {
            for (verts, _) in &self.cells {
                for w in verts.windows(2) {
                    let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
        for (i, (verts, _)) in self.cells.iter().enumerate() {
            let root = if split { find(&mut parent, verts[0]) } else { 0 };
            match groups.iter_mut().find(|g| g.0 == root) {
                Some(g) => g.1.push(i),
                None => groups.push((root, vec![i])),
            }
        }
        groups
            .into_iter()
            .map(|(_, cells)| {
                let mut used: Vec<u32> = cells.iter().flat_map(|&i| self.cells[i].0.iter().copied()).collect();
                used.sort_unstable();
                used.dedup();
                let rank = |v: u32| used.binary_search(&v).unwrap() as u32;
                let mut simplices = Vec::with_capacity(cells.len());
                let mut origins = Vec::with_capacity(cells.len());
                for &i in &cells {
                    let (verts, origin) = &self.cells[i];
                    let mut pairs: SmallVec<[(u32, VertexId); 4]> =
                        verts.iter().zip(&origin.verts).map(|(&v, &o)| (rank(v), o)).collect();
                    pairs.sort_unstable();
                    simplices.push(pairs.iter().map(|p| p.0).collect::<SmallVec<[u32; 4]>>());
                    origins.push(ChamberOrigin { cap: origin.cap, chamber: origin.chamber, verts: pairs.iter().map(|p| p.1).collect() });
                }
                let image = used.iter().map(|&v| self.image[v as usize]).collect();
                let cx = SimplicialComplex::with_vertex_count(used.len(), &simplices)?;
                let surface = Hypersurface::infer(SimplicialMap::new(cx, image, &model.complex)?)?;
                Ok(Piece { surface, origins })
            })
            .collect()
    }
}

/// Origin of work chamber `c`, re-expressed for the given work vertices of that chamber.
fn compose(work: &Piece, c: ChamberId, verts: &[VertexId]) -> ChamberOrigin {
    let ch = work.surface.map.domain.chamber(c);
    let o = &work.origins[c as usize];
    ChamberOrigin {
        cap: o.cap,
        chamber: o.chamber,
        verts: verts.iter().map(|w| o.verts[ch.iter().position(|x| x == w).unwrap()]).collect(),
    }
}

/// Pieces produced by cutting regions out of a piece.
pub(crate) struct Split {
    /// One piece per region, in order.
    pub contours: Vec<Piece>,
    /// Components of what is left, capped.
    pub remainder: Vec<Piece>,
}

/// Cuts the pairwise disjoint `regions` out of `work` and caps every cut circle on both sides.
///
/// New caps are appended to `caps`; their ids are positions in that list.
pub(crate) fn surgery(model: &Model, work: &Piece, regions: &[ChamberSet], caps: &mut Vec<Cap>) -> Result<Split> {
    let map = &work.surface.map;
    let dom = &map.domain;
    let mut rest = Raw { image: map.image.clone(), cells: Vec::new() };
    let mut taken = ChamberSet::new(dom.num_chambers());
    let mut contours = Vec::with_capacity(regions.len());
    for region in regions {
        taken.union_with(region);
        let cc = cut(dom, region)?;
        let mut side = Raw { image: cc.to_domain.iter().map(|&w| map.image[w as usize]).collect(), cells: Vec::new() };
        for (i, &c) in cc.chambers.iter().enumerate() {
            let verts: SmallVec<[u32; 4]> = cc.complex.chamber(i as u32).iter().copied().collect();
            let back: Vec<VertexId> = verts.iter().map(|&v| cc.to_domain[v as usize]).collect();
            side.cells.push((verts, compose(work, c, &back)));
        }
        for cycle in cc.boundary_components() {
            let loop_image: Vec<VertexId> = cycle.iter().map(|&v| side.image[v as usize]).collect();
            let cap = Cap { disk: cap_disk(model, &loop_image)? };
            let id = caps.len() as u32;
            side.glue_cap(&cap, id, &cycle);
            let rim: Vec<u32> = cycle.iter().map(|&v| cc.to_domain[v as usize]).collect();
            rest.glue_cap(&cap, id, &rim);
            caps.push(cap);
        }
        contours.extend(side.finish(model, false)?);
    }
    for c in 0..dom.num_chambers() as ChamberId {
        if !taken.contains(c) {
            let verts: SmallVec<[u32; 4]> = dom.chamber(c).iter().copied().collect();
            rest.cells.push((verts.clone(), compose(work, c, &verts)));
        }
    }
    let remainder = rest.finish(model, true)?;
    Ok(Split { contours, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::GrowthProfile;
    use crate::models::{boundary_sphere, generate, ModelKind, ModelSpec};

    #[test]
    fn cutting_a_cube_face() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 8).margin(2)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([2, 2, 2]).unwrap(), 4).unwrap();
        let work = Piece::root(&h);
        let y = (0..h.map.image.len() as u32).find(|&v| m.point(h.map.image[v as usize]) == Some([4, 4, 2])).unwrap();
        let region = GrowthProfile::compute(&h.map, &m.metric, y).chambers(1);
        let mut caps = Vec::new();
        let split = surgery(&m, &work, std::slice::from_ref(&region), &mut caps).unwrap();
        assert_eq!(split.contours.len(), 1);
        assert_eq!(split.remainder.len(), 1);
        assert_eq!(caps.len(), 1);
        let cap = caps[0].disk.volume();
        assert_eq!(split.contours[0].volume(), region.len() + cap);
        assert_eq!(split.remainder[0].volume(), h.volume() - region.len() + cap);
        assert_eq!(split.contours[0].surface.model, SurfaceModel::Sphere);
        assert_eq!(split.remainder[0].surface.model, SurfaceModel::Sphere);
    }
}
