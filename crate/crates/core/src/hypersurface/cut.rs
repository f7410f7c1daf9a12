//! Cutting a sub-collection of chambers along its non-manifold vertices.

use std::collections::{BTreeMap, HashMap};

use crate::complex::{ChamberId, ChamberSet, FaceKey, SimplicialComplex, VertexId};
use crate::error::{Error, Result};

/// A manifold complex obtained by duplicating pinch vertices of a chamber subset.
#[derive(Clone, Debug)]
pub struct CutComplex {
    pub complex: SimplicialComplex,
    /// The gluing map G^cut: cut vertex -> original domain vertex.
    pub to_domain: Vec<VertexId>,
    /// Original domain chamber of each cut chamber.
    pub chambers: Vec<ChamberId>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Cuts `sub` along the vertices whose star in `sub` is disconnected.
///
/// In dimension 2 every fan of `sub`-chambers around a vertex gets its own copy.
/// In dimension 1 the edges at a vertex are paired in chamber order.
pub fn cut(domain: &SimplicialComplex, sub: &ChamberSet) -> Result<CutComplex> {
    let k = domain.dim();
    if !(1..=2).contains(&k) {
        return Err(Error::UnsupportedDimension(k));
    }
    // (domain vertex, chamber) -> cut vertex
    let mut copy: HashMap<(VertexId, ChamberId), VertexId> = HashMap::new();
    let mut to_domain = Vec::new();
    for v in 0..domain.num_vertices() as u32 {
        let local: Vec<ChamberId> = domain.star(v).iter().copied().filter(|&c| sub.contains(c)).collect();
        if local.is_empty() {
            continue;
        }
        let mut parent: Vec<usize> = (0..local.len()).collect();
        if k == 1 {
            for i in (1..local.len()).step_by(2) {
                parent[i] = i - 1;
            }
        } else {
            for i in 0..local.len() {
                for j in i + 1..local.len() {
                    if domain.adjacent(local[i]).contains(&local[j]) {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut ids: BTreeMap<usize, VertexId> = BTreeMap::new();
        for (i, &c) in local.iter().enumerate() {
            let root = find(&mut parent, i);
            let id = *ids.entry(root).or_insert_with(|| {
                to_domain.push(v);
                to_domain.len() as u32 - 1
            });
            copy.insert((v, c), id);
        }
    }
    let chambers: Vec<ChamberId> = sub.iter().collect();
    let simplices: Vec<Vec<VertexId>> =
        chambers.iter().map(|&c| domain.chamber(c).iter().map(|&v| copy[&(v, c)]).collect()).collect();
    let complex = SimplicialComplex::with_vertex_count(to_domain.len(), &simplices)?;
    Ok(CutComplex { complex, to_domain, chambers })
}

impl CutComplex {
    /// Boundary components: cycles of vertices (k = 2) or endpoint pairs (k = 1).
    pub fn boundary_components(&self) -> Vec<Vec<VertexId>> {
        let cx = &self.complex;
        if cx.dim() == 1 {
            let mut deg = vec![0u32; cx.num_vertices()];
            for c in cx.chambers() {
                deg[c[0] as usize] += 1;
                deg[c[1] as usize] += 1;
            }
            return cx
                .chamber_components()
                .into_iter()
                .filter_map(|comp| {
                    let mut ends: Vec<VertexId> =
                        comp.iter().flat_map(|&c| cx.chamber(c).to_vec()).filter(|&v| deg[v as usize] == 1).collect();
                    ends.sort_unstable();
                    ends.dedup();
                    (!ends.is_empty()).then_some(ends)
                })
                .collect();
        }
        let edges: Vec<FaceKey> = cx.boundary_facets().into_iter().map(|(f, _)| f).collect();
        let mut nbrs: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for e in &edges {
            nbrs.entry(e[0]).or_default().push(e[1]);
            nbrs.entry(e[1]).or_default().push(e[0]);
        }
        for n in nbrs.values_mut() {
            n.sort_unstable();
        }
        let mut used = std::collections::HashSet::new();
        let mut out = Vec::new();
        for &start in nbrs.keys() {
            if used.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            used.insert(start);
            let mut prev = start;
            let mut cur = nbrs[&start][0];
            while cur != start {
                cycle.push(cur);
                used.insert(cur);
                let next = nbrs[&cur].iter().copied().find(|&w| w != prev).unwrap_or(start);
                prev = cur;
                cur = next;
            }
            out.push(cycle);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifold_sub_is_unchanged() {
        let cx = SimplicialComplex::from_simplices(&[[0, 1, 2], [1, 2, 3]]).unwrap();
        let c = cut(&cx, &ChamberSet::full(2)).unwrap();
        assert_eq!(c.complex.num_vertices(), 4);
        assert_eq!(c.to_domain, vec![0, 1, 2, 3]);
        assert_eq!(c.boundary_components(), vec![vec![0, 1, 3, 2]]);
    }

    #[test]
    fn pinch_is_split() {
        let cx = SimplicialComplex::from_simplices(&[[0, 1, 2], [0, 3, 4]]).unwrap();
        let c = cut(&cx, &ChamberSet::full(2)).unwrap();
        assert_eq!(c.complex.num_vertices(), 6);
        assert_eq!(c.complex.chamber_components().len(), 2);
        assert_eq!(c.to_domain.iter().filter(|&&v| v == 0).count(), 2);
        for (i, ch) in c.chambers.iter().enumerate() {
            let back: Vec<u32> = c.complex.chamber(i as u32).iter().map(|&v| c.to_domain[v as usize]).collect();
            let mut back = back;
            back.sort_unstable();
            assert_eq!(back, cx.chamber(*ch));
        }
    }

    #[test]
    fn wedge_of_arcs() {
        let cx = SimplicialComplex::from_simplices(&[[0, 1], [1, 2], [1, 3], [1, 4]]).unwrap();
        let c = cut(&cx, &ChamberSet::full(4)).unwrap();
        assert_eq!(c.to_domain.iter().filter(|&&v| v == 1).count(), 2);
        assert_eq!(c.boundary_components().len(), 2);
    }

    #[test]
    fn rejects_three_dimensions() {
        let cx = SimplicialComplex::from_simplices(&[[0, 1, 2, 3]]).unwrap();
        assert!(matches!(cut(&cx, &ChamberSet::full(1)), Err(Error::UnsupportedDimension(3))));
    }
}
