//! Chamber orientations and oriented image chains.

use std::collections::BTreeMap;

use crate::complex::{ChamberId, FaceKey, SimplicialComplex, VertexId};

/// Sign of the permutation sorting `v` (0 if `v` has repeats).
pub fn sort_sign(v: &[VertexId]) -> i8 {
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return 0;
            }
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Consistent orientation sign per chamber, relative to the sorted vertex order.
///
/// Each dual component is seeded with +1. Returns `None` when some facet lies in
/// more than two chambers or the propagation is inconsistent (non-orientable).
pub fn orient_chambers(cx: &SimplicialComplex) -> Option<Vec<i8>> {
    let n = cx.num_chambers();
    let mut o = vec![0i8; n];
    for seed in 0..n {
        if o[seed] != 0 {
            continue;
        }
        o[seed] = 1;
        let mut stack = vec![seed as ChamberId];
        while let Some(c) = stack.pop() {
            let ch = cx.chamber(c);
            for &d in cx.adjacent(c) {
                let dh = cx.chamber(d);
                let i = ch.iter().position(|v| dh.binary_search(v).is_err())?;
                let j = dh.iter().position(|v| ch.binary_search(v).is_err())?;
                let parity = if (i + j) % 2 == 0 { 1 } else { -1 };
                let want = -o[c as usize] * parity;
                match o[d as usize] {
                    0 => {
                        o[d as usize] = want;
                        stack.push(d);
                    }
                    s if s != want => return None,
                    _ => {}
                }
            }
        }
    }
    if cx.dim() > 0 {
        // a facet shared by three chambers would pass the pairwise test above
        let mut count = std::collections::HashMap::new();
        for c in 0..n as u32 {
            for f in cx.facets_of(c) {
                let e = count.entry(f).or_insert(0u8);
                *e += 1;
                if *e > 2 {
                    return None;
                }
            }
        }
    }
    Some(o)
}

/// Integer chain on ambient simplices keyed by their sorted vertex tuple.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain(pub BTreeMap<FaceKey, i64>);

impl Chain {
    /// Adds `coef` times the oriented simplex with vertices in the given order.
    pub fn add_oriented(&mut self, verts: &[VertexId], coef: i64) {
        let s = sort_sign(verts);
        if s == 0 || coef == 0 {
            return;
        }
        let mut key: FaceKey = verts.iter().copied().collect();
        key.sort_unstable();
        let e = self.0.entry(key.clone()).or_insert(0);
        *e += coef * s as i64;
        if *e == 0 {
            self.0.remove(&key);
        }
    }

    pub fn add(&mut self, other: &Chain) {
        for (k, &c) in &other.0 {
            let e = self.0.entry(k.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                self.0.remove(k);
            }
        }
    }

    pub fn negate(&mut self) {
        for c in self.0.values_mut() {
            *c = -*c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of absolute coefficients.
    pub fn mass(&self) -> u64 {
        self.0.values().map(|c| c.unsigned_abs()).sum()
    }

    /// Simplicial boundary.
    pub fn boundary(&self) -> Chain {
        let mut out = Chain::default();
        for (k, &c) in &self.0 {
            for skip in 0..k.len() {
                let f: FaceKey = k.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                out.add_oriented(&f, sign * c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::tests::octahedron;

    #[test]
    fn signs() {
        assert_eq!(sort_sign(&[0, 1, 2]), 1);
        assert_eq!(sort_sign(&[1, 0, 2]), -1);
        assert_eq!(sort_sign(&[2, 0, 1]), 1);
        assert_eq!(sort_sign(&[2, 2, 1]), 0);
    }

    #[test]
    fn octahedron_is_a_cycle() {
        let cx = octahedron();
        let o = orient_chambers(&cx).unwrap();
        let mut z = Chain::default();
        for c in 0..8u32 {
            z.add_oriented(cx.chamber(c), o[c as usize] as i64);
        }
        assert_eq!(z.mass(), 8);
        assert!(z.boundary().is_zero());
    }

    #[test]
    fn mobius_band_is_not_orientable() {
        // 5-vertex Moebius strip
        let t = [[0, 1, 2], [1, 2, 3], [2, 3, 4], [3, 4, 0], [4, 0, 1]];
        let cx = SimplicialComplex::from_simplices(&t).unwrap();
        assert!(orient_chambers(&cx).is_none());
    }
}
