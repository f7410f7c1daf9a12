//! ε-folded parts at scale ρ.

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Metric, VertexId};

use super::{GrowthProfile, SimplicialMap};

/// Local volume threshold `ε r^k / (2·12^k)`.
pub fn folded_threshold(eps: f64, r: f64, k: usize) -> f64 {
    eps * r.powi(k as i32) / (2.0 * 12f64.powi(k as i32))
}

/// Folded vertices with, for each, the least radius witnessing the fold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldedSet {
    pub eps: f64,
    pub rho: f64,
    pub members: Vec<VertexId>,
    pub witness: Vec<u32>,
}

impl FoldedSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Least `r ∈ [1, ⌊ρ⌋]` with `Vol(h(v,r))` at or below the threshold.
pub fn fold_witness(profile: &GrowthProfile, eps: f64, rho: f64, k: usize) -> Option<u32> {
    let top = rho.floor() as i64;
    (1..=top).find(|&r| profile.volume_at(r) as f64 <= folded_threshold(eps, r as f64, k)).map(|r| r as u32)
}

/// Exact folded set by scanning every integer radius for every vertex of M_Vol.
pub fn folded_set(map: &SimplicialMap, metric: &Metric, eps: f64, rho: f64) -> FoldedSet {
    let k = map.dim();
    let verts = map.volume_vertices();
    // below this radius the threshold is under 1 and every M_Vol vertex has volume >= 1
    let first = (2.0 * 12f64.powi(k as i32) / eps).powf(1.0 / k as f64);
    let hits: Vec<(VertexId, u32)> = if rho.floor() < first - 1e-9 {
        Vec::new()
    } else {
        verts
            .par_iter()
            .filter_map(|&v| {
                let p = GrowthProfile::compute(map, metric, v);
                fold_witness(&p, eps, rho, k).map(|r| (v, r))
            })
            .collect()
    };
    FoldedSet { eps, rho, members: hits.iter().map(|h| h.0).collect(), witness: hits.iter().map(|h| h.1).collect() }
}
