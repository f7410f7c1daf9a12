//! Cone fills: push the hypersurface down its combing paths until it collapses onto the apex.

use std::collections::BTreeSet;
use std::cmp::Reverse;

use smallvec::SmallVec;

use crate::complex::{SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::hypersurface::{FillingDomain, Hypersurface, SimplicialMap};
use crate::models::Model;

use super::Combing;

/// Builds a filling of `h` whose cells run along the combing paths to `comb.basepoint`.
///
/// The apex is normally a vertex of the image (see [`default_apex`]) but any vertex
/// inside the margin is accepted.
/// The front starts as a copy of the domain of `h`. Pushing a front vertex `v`
/// adds the cone from a fresh vertex (mapped one step down the path of `v`) over
/// the front star of `v`, and the fresh vertex replaces `v` on the front. Each
/// cone cell has to map into an ambient simplex, so every elementary rectangle
/// between neighbouring paths is filled inside a single vertex star. Once the
/// whole front sits on the apex it is closed off by a collapsed cone.
pub fn cone_fill(model: &Model, h: &Hypersurface, comb: &Combing) -> Result<FillingDomain> {
    let k = h.k();
    if !(1..=2).contains(&k) {
        return Err(Error::UnsupportedDimension(k));
    }
    let ambient = &model.complex;
    let apex = comb.basepoint;
    model.margin.check(h.map.image.iter().copied().chain([apex]))?;
    let dom = &h.map.domain;
    let n = dom.num_vertices();
    let mut image: Vec<VertexId> = h.map.image.clone();
    let mut cur: Vec<VertexId> = (0..n as u32).collect();
    let mut cells: Vec<SmallVec<[VertexId; 4]>> = Vec::new();
    let depth = |w: VertexId| comb.depth[w as usize];

    let mut queue: BTreeSet<(Reverse<u32>, VertexId)> =
        (0..n as u32).filter(|&u| depth(image[u as usize]) > 0).map(|u| (Reverse(depth(image[u as usize])), u)).collect();
    let fits = |u: VertexId, t: VertexId, cur: &[VertexId], image: &[VertexId]| {
        model.margin.allows(t)
            && dom.star(u).iter().all(|&c| {
                let mut f: SmallVec<[VertexId; 4]> = dom.chamber(c).iter().map(|&w| image[cur[w as usize] as usize]).collect();
                f.push(t);
                ambient.spans_simplex(&f)
            })
    };
    while !queue.is_empty() {
        let at = |u: VertexId, cur: &[VertexId], image: &[VertexId]| image[cur[u as usize] as usize];
        // the combing step first; when every front vertex is stuck, any neighbour closer to the apex will do
        let strict = queue.iter().find_map(|&(d, u)| {
            let t = comb.parent[at(u, &cur, &image) as usize];
            fits(u, t, &cur, &image).then_some((d, u, t))
        });
        let step = strict.or_else(|| {
            queue.iter().find_map(|&(d, u)| {
                let p = at(u, &cur, &image);
                let mut down: Vec<VertexId> = ambient.neighbors(p).iter().copied().filter(|&w| depth(w) < depth(p)).collect();
                down.sort_by_key(|&w| (Reverse(depth(w)), w));
                down.into_iter().find(|&t| fits(u, t, &cur, &image)).map(|t| (d, u, t))
            })
        });
        let Some((d, u, t)) = step else {
            return Err(Error::RectangleNotStarFillable { remaining: queue.len() });
        };
        queue.remove(&(d, u));
        let fresh = image.len() as VertexId;
        image.push(t);
        for &c in dom.star(u) {
            let mut cell: SmallVec<[VertexId; 4]> = dom.chamber(c).iter().map(|&w| cur[w as usize]).collect();
            cell.push(fresh);
            cells.push(cell);
        }
        cur[u as usize] = fresh;
        if depth(t) > 0 {
            queue.insert((Reverse(depth(t)), u));
        }
    }
    let top = image.len() as VertexId;
    image.push(apex);
    for ch in dom.chambers() {
        let mut cell: SmallVec<[VertexId; 4]> = ch.iter().map(|&w| cur[w as usize]).collect();
        cell.push(top);
        cells.push(cell);
    }
    let complex = SimplicialComplex::with_vertex_count(image.len(), &cells)?;
    let map = SimplicialMap::new(complex, image, ambient)?;
    Ok(FillingDomain { map, boundary: (0..n as u32).collect() })
}

/// Default apex: the lowest-id vertex of the image.
pub fn default_apex(h: &Hypersurface) -> VertexId {
    h.map.image.iter().copied().min().expect("hypersurface has vertices")
}
