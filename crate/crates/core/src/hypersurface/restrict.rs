//! The restrictions C(v,r) of a map and their volume growth.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::complex::{facet_key, ChamberId, ChamberSet, FaceKey, Metric, SimplicialComplex, VertexId, UNREACHABLE};

use super::SimplicialMap;

/// Entry radius of every domain chamber into C(v,·) for one center `v`.
///
/// `level[c]` is the least `r` with `c ∈ C(v,r)`. It is computed once by a
/// bottleneck search from the star of `v`, so all radii come out of one pass.
#[derive(Clone, Debug)]
pub struct GrowthProfile {
    pub center: VertexId,
    pub level: Vec<u32>,
    /// Sorted levels of the non-collapsed chambers.
    vol_levels: Vec<u32>,
}

impl GrowthProfile {
    pub fn compute(map: &SimplicialMap, metric: &Metric, v: VertexId) -> Self {
        let dom = &map.domain;
        let row = metric.row(map.image[v as usize]);
        let radius = |c: ChamberId| dom.chamber(c).iter().map(|&w| row[map.image[w as usize] as usize]).max().unwrap();
        let mut level = vec![UNREACHABLE; dom.num_chambers()];
        let mut heap = BinaryHeap::new();
        for &c in dom.star(v) {
            let r = radius(c);
            if r < level[c as usize] {
                level[c as usize] = r;
                heap.push(Reverse((r, c)));
            }
        }
        while let Some(Reverse((r, c))) = heap.pop() {
            if r > level[c as usize] {
                continue;
            }
            for &d in dom.adjacent(c) {
                let rd = radius(d).max(r);
                if rd < level[d as usize] {
                    level[d as usize] = rd;
                    heap.push(Reverse((rd, d)));
                }
            }
        }
        let mut vol_levels: Vec<u32> = (0..dom.num_chambers() as u32)
            .filter(|&c| !map.is_collapsed(c) && level[c as usize] != UNREACHABLE)
            .map(|c| level[c as usize])
            .collect();
        vol_levels.sort_unstable();
        Self { center: v, level, vol_levels }
    }

    /// Vol(h(v,r)).
    pub fn volume_at(&self, r: i64) -> usize {
        if r < 0 {
            return 0;
        }
        self.vol_levels.partition_point(|&l| (l as i64) <= r)
    }

    /// Chambers of C(v,r).
    pub fn chambers(&self, r: i64) -> ChamberSet {
        let mut s = ChamberSet::new(self.level.len());
        if r >= 0 {
            for (c, &l) in self.level.iter().enumerate() {
                if l != UNREACHABLE && (l as i64) <= r {
                    s.insert(c as u32);
                }
            }
        }
        s
    }

    /// Radius after which C(v,r) stops growing.
    pub fn saturation(&self) -> u32 {
        self.level.iter().copied().filter(|&l| l != UNREACHABLE).max().unwrap_or(0)
    }

    pub fn total_volume(&self) -> usize {
        self.vol_levels.len()
    }
}

/// C(v,r) together with its internal frontier.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub chambers: ChamberSet,
    /// Faces in exactly one chamber of C(v,r) and two chambers of the domain.
    pub boundary: Vec<FaceKey>,
}

impl Restriction {
    /// Frontier faces whose image is non-degenerate.
    pub fn boundary_volume(&self, map: &SimplicialMap) -> usize {
        self.boundary
            .iter()
            .filter(|f| {
                let img: Vec<VertexId> = f.iter().map(|&v| map.image[v as usize]).collect();
                (0..img.len()).all(|i| !img[i + 1..].contains(&img[i]))
            })
            .count()
    }

    pub fn volume(&self, map: &SimplicialMap) -> usize {
        self.chambers.iter().filter(|&c| !map.is_collapsed(c)).count()
    }
}

/// Chamber across facet `skip` of `c`, if any.
pub fn neighbor_across(cx: &SimplicialComplex, c: ChamberId, skip: usize) -> Option<ChamberId> {
    let f = facet_key(cx.chamber(c), skip);
    cx.adjacent(c).iter().copied().find(|&d| {
        let dh = cx.chamber(d);
        f.iter().all(|v| dh.binary_search(v).is_ok())
    })
}

/// Internal frontier of a chamber set.
pub fn frontier(cx: &SimplicialComplex, set: &ChamberSet) -> Vec<FaceKey> {
    let mut out = Vec::new();
    for c in set.iter() {
        for skip in 0..=cx.dim() {
            if let Some(d) = neighbor_across(cx, c, skip) {
                if !set.contains(d) {
                    out.push(facet_key(cx.chamber(c), skip));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// C(v,r) of `map`: chambers reachable from the star of `v` through chambers mapped into B̄(map(v), r).
pub fn restrict(map: &SimplicialMap, metric: &Metric, v: VertexId, r: i64) -> Restriction {
    let chambers = GrowthProfile::compute(map, metric, v).chambers(r);
    let boundary = frontier(&map.domain, &chambers);
    Restriction { chambers, boundary }
}
