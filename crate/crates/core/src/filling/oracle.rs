//! Exact chain fills on grid patches, plus a bounded exhaustive search to certify them.
//!
//! The top-dimensional homology of a (punctured) grid patch vanishes, so an
//! integer chain with a prescribed boundary is unique when it exists. It is
//! found by propagating from the chambers that touch the patch boundary, one
//! facet at a time, and then checked on every facet.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::complex::{facet_key, ChamberId, ChamberSet, FaceKey, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::hypersurface::orientation::Chain;
use crate::hypersurface::{skeleton_radius, FillingDomain, Hypersurface, SimplicialMap};
use crate::models::Model;

/// Integer coefficients on ambient chambers (sorted, nonzero only).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainFill {
    pub coefficients: Vec<(ChamberId, i64)>,
}

impl ChainFill {
    pub fn mass(&self) -> u64 {
        self.coefficients.iter().map(|&(_, x)| x.unsigned_abs()).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = ChamberId> + '_ {
        self.coefficients.iter().map(|&(c, _)| c)
    }

    pub fn coefficient(&self, c: ChamberId) -> i64 {
        self.coefficients.binary_search_by_key(&c, |&(d, _)| d).map_or(0, |i| self.coefficients[i].1)
    }

    /// The chain as oriented simplices.
    pub fn to_chain(&self, model: &Model) -> Result<Chain> {
        let s = model.orientation().ok_or(Error::UnsupportedAmbient)?;
        let mut out = Chain::default();
        for &(c, x) in &self.coefficients {
            out.add_oriented(model.complex.chamber(c), x * s[c as usize] as i64);
        }
        Ok(out)
    }

    /// Filling radius of the support, measured on its 1-skeleton.
    pub fn radius(&self, model: &Model, h: &Hypersurface) -> f64 {
        skeleton_radius(h, &model.metric, self.support().map(|c| model.complex.chamber(c).to_vec()))
    }

    /// Realizes a chain with coefficients ±1 as an embedded filling domain.
    ///
    /// Needs `h` to be injective on vertices, so that the support can be glued to it.
    pub fn to_domain(&self, model: &Model, h: &Hypersurface) -> Result<FillingDomain> {
        if self.coefficients.iter().any(|&(_, x)| x.abs() != 1) {
            return Err(Error::Degenerate("chain has multiplicities, no embedded domain".into()));
        }
        let mut id: HashMap<VertexId, VertexId> = HashMap::new();
        let mut image = Vec::new();
        for &w in &h.map.image {
            if id.insert(w, image.len() as VertexId).is_some() {
                return Err(Error::Degenerate("hypersurface is not injective".into()));
            }
            image.push(w);
        }
        let cells: Vec<Vec<VertexId>> = self
            .support()
            .map(|c| {
                model
                    .complex
                    .chamber(c)
                    .iter()
                    .map(|&w| {
                        *id.entry(w).or_insert_with(|| {
                            image.push(w);
                            image.len() as VertexId - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let boundary = (0..h.map.domain.num_vertices() as u32).collect();
        let complex = SimplicialComplex::with_vertex_count(image.len(), &cells)?;
        let d = FillingDomain { map: SimplicialMap::new(complex, image, &model.complex)?, boundary };
        d.check_boundary(h)?;
        Ok(d)
    }
}

fn facet_sign(s: &[i8], c: ChamberId, skip: u8) -> i64 {
    let o = s[c as usize] as i64;
    if skip.is_multiple_of(2) {
        o
    } else {
        -o
    }
}

fn check_cycle(model: &Model, z: &Chain) -> Result<()> {
    if let Some(f) = z.0.keys().find(|f| f.len() != model.complex.dim()) {
        return Err(Error::InvalidMap(format!("cycle face {f:?} is not a facet of the ambient")));
    }
    Ok(())
}

/// The unique chain with boundary `z` avoiding `forbidden`, or `None` if there is none.
pub fn solve_chain(model: &Model, z: &Chain, forbidden: Option<&ChamberSet>) -> Result<Option<ChainFill>> {
    check_cycle(model, z)?;
    let s = model.orientation().ok_or(Error::UnsupportedAmbient)?;
    let cx = &model.complex;
    let index = model.facets();
    let n = cx.num_chambers();
    let allowed = |c: ChamberId| forbidden.is_none_or(|f| !f.contains(c));
    let zf = |f: &FaceKey| z.0.get(f).copied().unwrap_or(0);
    let others = |f: &FaceKey, c: ChamberId| -> Vec<(ChamberId, u8)> {
        index.get(f).iter().copied().filter(|&(d, _)| d != c && allowed(d)).collect()
    };
    let mut x: Vec<Option<i64>> = vec![None; n];
    for start in 0..n as u32 {
        if x[start as usize].is_some() || !allowed(start) {
            continue;
        }
        // gather the dual component and pick a seed touching the boundary of the allowed region
        let mut comp = vec![start];
        let mut seen = ChamberSet::new(n);
        seen.insert(start);
        let mut seed = None;
        let mut i = 0;
        while i < comp.len() {
            let c = comp[i];
            i += 1;
            for skip in 0..cx.dim() + 1 {
                let f = facet_key(cx.chamber(c), skip);
                let nb = others(&f, c);
                if nb.is_empty() && seed.is_none() {
                    seed = Some((c, skip as u8, f.clone()));
                }
                for (d, _) in nb {
                    if !seen.contains(d) {
                        seen.insert(d);
                        comp.push(d);
                    }
                }
            }
        }
        let Some((c0, skip0, f0)) = seed else {
            return Err(Error::UnsupportedAmbient);
        };
        x[c0 as usize] = Some(zf(&f0) * facet_sign(s, c0, skip0));
        let mut queue = VecDeque::from([c0]);
        while let Some(c) = queue.pop_front() {
            let xc = x[c as usize].unwrap();
            for skip in 0..cx.dim() + 1 {
                let f = facet_key(cx.chamber(c), skip);
                for (d, dskip) in others(&f, c) {
                    if x[d as usize].is_none() {
                        let rest = zf(&f) - xc * facet_sign(s, c, skip as u8);
                        x[d as usize] = Some(rest * facet_sign(s, d, dskip));
                        queue.push_back(d);
                    }
                }
            }
        }
    }
    // every facet, including cycle faces that no allowed chamber covers
    let consistent = index.0.iter().all(|(f, cs)| {
        let lhs: i64 =
            cs.iter().filter(|&&(c, _)| allowed(c)).map(|&(c, skip)| x[c as usize].unwrap() * facet_sign(s, c, skip)).sum();
        lhs == zf(f)
    }) && z.0.keys().all(|f| !index.get(f).is_empty());
    if !consistent {
        return Ok(None);
    }
    let coefficients =
        x.iter().enumerate().filter_map(|(c, v)| v.filter(|&v| v != 0).map(|v| (c as ChamberId, v))).collect();
    Ok(Some(ChainFill { coefficients }))
}

/// Search strategy for [`enumerate_fills`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Visit every bounded solution.
    Exhaustive,
    /// Prune partial assignments that cannot beat the best mass so far.
    BranchAndBound,
}

/// Outcome of a bounded search over chains supported in the image bounding box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub window: usize,
    pub bound: i64,
    pub solutions: u64,
    pub min_mass: Option<u64>,
    pub nodes: u64,
}

struct Constraint {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

/// Allowed chambers inside the bounding box of the support of `z`.
pub fn window(model: &Model, z: &Chain, forbidden: Option<&ChamberSet>) -> Result<Vec<ChamberId>> {
    check_cycle(model, z)?;
    let coords = model.coords.as_ref().ok_or(Error::UnsupportedAmbient)?;
    if z.is_zero() {
        return Ok(Vec::new());
    }
    let mut lo = [i32::MAX; 3];
    let mut hi = [i32::MIN; 3];
    for f in z.0.keys() {
        for &v in f {
            let p = coords.point(v);
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
    }
    let cx = &model.complex;
    Ok((0..cx.num_chambers() as u32)
        .filter(|&c| {
            forbidden.is_none_or(|f| !f.contains(c))
                && cx.chamber(c).iter().all(|&v| {
                    let p = coords.point(v);
                    (0..3).all(|a| lo[a] <= p[a] && p[a] <= hi[a])
                })
        })
        .collect())
}

/// Enumerates chains with coefficients in `[-bound, bound]` on the allowed chambers
/// inside the bounding box of `z`, whose boundary is `z`.
///
/// Chambers are assigned in gallery order and each facet equation is checked as
/// soon as its last chamber is assigned, which is where a chamber's value gets forced.
pub fn enumerate_fills(
    model: &Model,
    z: &Chain,
    forbidden: Option<&ChamberSet>,
    bound: i64,
    mode: SearchMode,
) -> Result<Enumeration> {
    let window = window(model, z, forbidden)?;
    let s = model.orientation().ok_or(Error::UnsupportedAmbient)?;
    let cx = &model.complex;
    let index = model.facets();
    let in_window = ChamberSet::from_ids(cx.num_chambers(), window.iter().copied());
    let inside = |c: ChamberId| in_window.contains(c);
    // gallery order inside the window
    let mut pos: BTreeMap<ChamberId, usize> = BTreeMap::new();
    let mut order = Vec::new();
    for &start in &window {
        if pos.contains_key(&start) {
            continue;
        }
        pos.insert(start, order.len());
        order.push(start);
        let mut i = order.len() - 1;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for &d in cx.adjacent(c) {
                if inside(d) && !pos.contains_key(&d) {
                    pos.insert(d, order.len());
                    order.push(d);
                }
            }
        }
    }
    let mut facets: BTreeMap<FaceKey, ()> = z.0.keys().map(|f| (f.clone(), ())).collect();
    for &c in &order {
        for f in cx.facets_of(c) {
            facets.insert(f, ());
        }
    }
    let mut at: Vec<Vec<Constraint>> = (0..order.len()).map(|_| Vec::new()).collect();
    let mut infeasible = false;
    for f in facets.keys() {
        let terms: Vec<(usize, i64)> = index
            .get(f)
            .iter()
            .filter_map(|&(c, skip)| pos.get(&c).map(|&p| (p, facet_sign(s, c, skip))))
            .collect();
        let rhs = z.0.get(f).copied().unwrap_or(0);
        match terms.iter().map(|t| t.0).max() {
            Some(last) => at[last].push(Constraint { terms, rhs }),
            None => infeasible |= rhs != 0,
        }
    }
    let mut e = Enumeration { window: order.len(), bound, solutions: 0, min_mass: None, nodes: 0 };
    if infeasible {
        return Ok(e);
    }
    let mut vals = vec![0i64; order.len()];
    search(0, 0, &at, &mut vals, bound, mode, &mut e);
    Ok(e)
}

fn search(p: usize, mass: u64, at: &[Vec<Constraint>], vals: &mut [i64], bound: i64, mode: SearchMode, e: &mut Enumeration) {
    e.nodes += 1;
    if mode == SearchMode::BranchAndBound && e.min_mass.is_some_and(|m| mass >= m) && p < vals.len() {
        return;
    }
    if p == vals.len() {
        e.solutions += 1;
        e.min_mass = Some(e.min_mass.map_or(mass, |m| m.min(mass)));
        return;
    }
    // a constraint ending here forces the value
    let forced = at[p].first().map(|con| {
        let (mut rest, mut own) = (con.rhs, 0);
        for &(q, sgn) in &con.terms {
            if q == p {
                own = sgn;
            } else {
                rest -= vals[q] * sgn;
            }
        }
        rest * own
    });
    let candidates: Vec<i64> = match forced {
        Some(v) if v.abs() <= bound => vec![v],
        Some(_) => vec![],
        None => (-bound..=bound).collect(),
    };
    for v in candidates {
        vals[p] = v;
        let ok = at[p].iter().all(|con| con.terms.iter().map(|&(q, sgn)| vals[q] * sgn).sum::<i64>() == con.rhs);
        if ok {
            search(p + 1, mass + v.unsigned_abs(), at, vals, bound, mode, e);
        }
    }
    vals[p] = 0;
}
