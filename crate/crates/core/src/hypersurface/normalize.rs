//! Contraction of collapsed interior edges of a filling domain.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::complex::{FaceKey, SimplicialComplex, VertexId};

use super::{FillingDomain, SimplicialMap};

fn subsets(verts: &[VertexId], out: &mut HashSet<FaceKey>) {
    let n = verts.len();
    for mask in 1u32..(1 << n) {
        out.insert((0..n).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect());
    }
}

fn link(cx: &SimplicialComplex, face: &[VertexId]) -> HashSet<FaceKey> {
    let mut out = HashSet::new();
    for c in cx.chambers_containing(face) {
        let rest: Vec<VertexId> = cx.chamber(c).iter().copied().filter(|v| !face.contains(v)).collect();
        subsets(&rest, &mut out);
    }
    out
}

/// Every chamber is non-collapsed or touches the boundary.
pub fn satisfies_dichotomy(d: &FillingDomain) -> bool {
    let on_boundary: HashSet<VertexId> = d.boundary.iter().copied().collect();
    (0..d.map.domain.num_chambers() as u32)
        .all(|c| !d.map.is_collapsed(c) || d.map.domain.chamber(c).iter().any(|v| on_boundary.contains(v)))
}

fn facet_counts(chambers: &[Vec<VertexId>]) -> HashMap<FaceKey, i32> {
    let mut count = HashMap::new();
    for c in chambers {
        for skip in 0..c.len() {
            let f: FaceKey = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            *count.entry(f).or_insert(0) += 1;
        }
    }
    count
}

/// Merging `v` into `w`, if that keeps the boundary, the manifold condition and every
/// other vertex in place. Returns the replaced chambers (the stars of `v` and `w`) and
/// their replacements.
fn try_contract(
    cx: &SimplicialComplex,
    global: &HashMap<FaceKey, i32>,
    v: VertexId,
    w: VertexId,
) -> Option<(Vec<u32>, Vec<Vec<VertexId>>)> {
    let lv = link(cx, &[v]);
    let lw = link(cx, &[w]);
    let lvw = link(cx, &[v.min(w), v.max(w)]);
    if lv.intersection(&lw).any(|f| !lvw.contains(f)) {
        return None;
    }
    let mut local: Vec<u32> = cx.star(v).iter().chain(cx.star(w)).copied().collect();
    local.sort_unstable();
    local.dedup();
    let before: Vec<Vec<VertexId>> = local.iter().map(|&c| cx.chamber(c).to_vec()).collect();
    let after: Vec<Vec<VertexId>> = before
        .iter()
        .filter(|c| !(c.contains(&v) && c.contains(&w)))
        .map(|c| {
            let mut c: Vec<VertexId> = c.iter().map(|&x| if x == v { w } else { x }).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut uniq: HashSet<&Vec<VertexId>> = HashSet::new();
    for c in &after {
        if !uniq.insert(c) || cx.find_chamber(c).is_some_and(|d| local.binary_search(&d).is_err()) {
            return None;
        }
    }
    let old = facet_counts(&before);
    let new = facet_counts(&after);
    for f in old.keys().chain(new.keys()) {
        let g = global.get(f).copied().unwrap_or(0);
        let n = g - old.get(f).copied().unwrap_or(0) + new.get(f).copied().unwrap_or(0);
        if n > 2 || (g == 1) != (n == 1) {
            return None;
        }
    }
    // no vertex other than v may lose its last chamber
    let verts: HashSet<VertexId> = before.iter().flatten().copied().filter(|&x| x != v).collect();
    let stranded = |x: VertexId| {
        cx.star(x).iter().all(|&c| {
            let ch = cx.chamber(c);
            ch.binary_search(&v).is_ok() && ch.binary_search(&w).is_ok()
        })
    };
    if verts.into_iter().any(stranded) {
        return None;
    }
    Some((local, after))
}

/// Contracts interior edges whose endpoints share an image until none passes the link condition.
///
/// Each pass contracts a batch of edges with vertex-disjoint closed stars, which
/// cannot interfere with each other, and rebuilds the complex once.
pub fn normalize_domain(d: &FillingDomain) -> FillingDomain {
    let mut image = d.map.image.clone();
    let mut boundary = d.boundary.clone();
    let mut cx = d.map.domain.as_ref().clone();
    // a failed contraction can only start passing once something within two steps changed
    let mut dirty = vec![true; cx.num_vertices()];
    loop {
        let on_boundary: HashSet<VertexId> = boundary.iter().copied().collect();
        let chambers: Vec<Vec<VertexId>> = cx.chambers().map(|c| c.to_vec()).collect();
        let global = facet_counts(&chambers);
        let mut touched = vec![false; cx.num_vertices()];
        let mut dropped = vec![false; cx.num_chambers()];
        let mut removed = vec![false; cx.num_vertices()];
        let mut added: Vec<Vec<VertexId>> = Vec::new();
        for v in 0..cx.num_vertices() as u32 {
            if !dirty[v as usize] || on_boundary.contains(&v) || touched[v as usize] {
                continue;
            }
            for &w in cx.neighbors(v) {
                if image[v as usize] != image[w as usize] || touched[w as usize] {
                    continue;
                }
                let region = cx.star(v).iter().chain(cx.star(w));
                if region.flat_map(|&c| cx.chamber(c)).any(|&x| touched[x as usize]) {
                    continue;
                }
                let Some((local, after)) = try_contract(&cx, &global, v, w) else { continue };
                for &c in &local {
                    dropped[c as usize] = true;
                    for &x in cx.chamber(c) {
                        touched[x as usize] = true;
                    }
                }
                removed[v as usize] = true;
                added.extend(after);
                break;
            }
        }
        if !removed.contains(&true) {
            break;
        }
        // drop contracted vertices and renumber densely
        let mut remap = vec![0u32; cx.num_vertices()];
        let mut kept = 0u32;
        for (x, r) in remap.iter_mut().enumerate() {
            *r = kept;
            if !removed[x] {
                kept += 1;
            }
        }
        let next: Vec<Vec<VertexId>> = chambers
            .into_iter()
            .enumerate()
            .filter(|&(c, _)| !dropped[c])
            .map(|(_, c)| c)
            .chain(added)
            .map(|c| c.into_iter().map(|x| remap[x as usize]).collect())
            .collect();
        let mut x = 0;
        image.retain(|_| {
            x += 1;
            !removed[x - 1]
        });
        for b in boundary.iter_mut() {
            *b = remap[*b as usize];
        }
        cx = SimplicialComplex::with_vertex_count(image.len(), &next).expect("contraction keeps a complex");
        dirty = vec![false; cx.num_vertices()];
        let mut frontier: Vec<VertexId> =
            (0..touched.len()).filter(|&x| touched[x] && !removed[x]).map(|x| remap[x]).collect();
        for _ in 0..=2 {
            let mut next = Vec::new();
            for x in frontier {
                if !dirty[x as usize] {
                    dirty[x as usize] = true;
                    next.extend_from_slice(cx.neighbors(x));
                }
            }
            frontier = next;
        }
    }
    FillingDomain { map: SimplicialMap { domain: Arc::new(cx), image }, boundary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_combing, cone_fill};
    use crate::models::{generate, square_loop, ModelKind, ModelSpec};

    #[test]
    fn keeps_boundary_and_drops_collapsed_interior() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 10).margin(1)).unwrap();
        let h = square_loop(&m, m.vertex_at([1, 1, 0]).unwrap(), 3).unwrap();
        let comb = build_combing(&m.complex, &m.metric, m.vertex_at([7, 7, 0]).unwrap()).unwrap();
        let d = cone_fill(&m, &h, &comb).unwrap();
        let n = normalize_domain(&d);
        n.check_boundary(&h).unwrap();
        assert_eq!(n.volume(), d.volume());
        assert!(n.map.domain.num_chambers() < d.map.domain.num_chambers());
    }
}
