//! Geodesic combings from BFS trees.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{Metric, SimplicialComplex, VertexId, UNREACHABLE};
use crate::error::{Error, Result};

/// Parent-pointer tree of shortest paths towards a basepoint.
#[derive(Clone, Debug, Serialize)]
pub struct Combing {
    pub basepoint: VertexId,
    pub parent: Vec<VertexId>,
    pub depth: Vec<u32>,
    /// Fellow-traveling constant L measured on the checked edges.
    pub measured_l: f64,
    /// Additive quasi-geodesic constant C (0 for BFS paths).
    pub measured_c: f64,
    pub checked_pairs: usize,
}

/// Edge budget above which fellow-traveling is measured on a seeded sample.
const EXHAUSTIVE_EDGES: usize = 20_000;

impl Combing {
    /// Path from the basepoint to `y`.
    pub fn path(&self, y: VertexId) -> Vec<VertexId> {
        let mut p = vec![y];
        let mut cur = y;
        while cur != self.basepoint {
            cur = self.parent[cur as usize];
            p.push(cur);
        }
        p.reverse();
        p
    }

    /// Vertex at time `i` on the path to `y`, held at `y` after arrival.
    pub fn at(&self, y: VertexId, i: u32) -> VertexId {
        let mut cur = y;
        let mut d = self.depth[y as usize];
        while d > i {
            cur = self.parent[cur as usize];
            d -= 1;
        }
        cur
    }
}

/// BFS combing with lowest-id parent tie-break, with measured constants.
pub fn build_combing(cx: &SimplicialComplex, metric: &Metric, x0: VertexId) -> Result<Combing> {
    let mut comb = bfs_tree(cx, x0)?;
    measure(&mut comb, cx, metric, 0);
    Ok(comb)
}

/// The combing tree alone; `measured_l` is left at 1 until [`measure`] runs.
pub fn bfs_tree(cx: &SimplicialComplex, x0: VertexId) -> Result<Combing> {
    cx.check_vertex(x0)?;
    let depth = cx.bfs(x0);
    if depth.contains(&UNREACHABLE) {
        return Err(Error::Disconnected);
    }
    let parent: Vec<VertexId> = (0..cx.num_vertices() as u32)
        .map(|y| {
            if y == x0 {
                return x0;
            }
            let d = depth[y as usize];
            *cx.neighbors(y).iter().find(|&&w| depth[w as usize] + 1 == d).unwrap()
        })
        .collect();
    Ok(Combing { basepoint: x0, parent, depth, measured_l: 1.0, measured_c: 0.0, checked_pairs: 0 })
}

/// Measures L over all edges, or over a seeded sample of them on large complexes.
pub fn measure(comb: &mut Combing, cx: &SimplicialComplex, metric: &Metric, seed: u64) {
    let mut edges: Vec<(VertexId, VertexId)> = (0..cx.num_vertices() as u32)
        .flat_map(|y| cx.neighbors(y).iter().filter(move |&&a| a > y).map(move |&a| (y, a)))
        .collect();
    if edges.len() > EXHAUSTIVE_EDGES {
        edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        edges.truncate(EXHAUSTIVE_EDGES);
    }
    let paths: Vec<Vec<VertexId>> = (0..cx.num_vertices() as u32).map(|y| comb.path(y)).collect();
    let mut worst = 0u32;
    for &(y, a) in &edges {
        let (py, pa) = (&paths[y as usize], &paths[a as usize]);
        for i in 0..py.len().max(pa.len()) {
            let u = py[i.min(py.len() - 1)];
            let w = pa[i.min(pa.len() - 1)];
            if u != w {
                worst = worst.max(metric.row(u)[w as usize]);
            }
        }
    }
    // dist <= L·dist(y,a) + L with dist(y,a) = 1
    comb.measured_l = (worst as f64 / 2.0).max(1.0);
    comb.measured_c = 0.0;
    comb.checked_pairs = edges.len();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{generate, ModelKind, ModelSpec};
    use std::sync::Arc;

    #[test]
    fn grid_combing_fellow_travels() {
        let m = generate(&ModelSpec::new(ModelKind::Grid2, 16)).unwrap();
        let c = build_combing(&m.complex, &m.metric, 0).unwrap();
        assert!(c.measured_l <= 2.0);
        assert_eq!(c.checked_pairs, m.complex.faces(1).len());
        let far = m.vertex_at([16, 16, 0]).unwrap();
        assert_eq!(c.path(far).len(), 17);
    }

    #[test]
    fn triangle_combing() {
        let cx = Arc::new(SimplicialComplex::from_simplices(&[[0, 1, 2]]).unwrap());
        let metric = Metric::new(cx.clone());
        for x0 in 0..3 {
            let c = build_combing(&cx, &metric, x0).unwrap();
            assert_eq!(c.measured_l, 1.0);
            assert!((0..3).all(|y| c.path(y).len() <= 2));
        }
    }

    #[test]
    fn disconnected_is_rejected() {
        let cx = Arc::new(SimplicialComplex::from_simplices(&[[0, 1, 2], [3, 4, 5]]).unwrap());
        let metric = Metric::new(cx.clone());
        assert!(matches!(build_combing(&cx, &metric, 0), Err(Error::Disconnected)));
    }
}
