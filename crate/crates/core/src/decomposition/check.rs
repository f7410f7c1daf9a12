//! The shared certificate checker.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypersurface::orientation::{orient_chambers, sort_sign, Chain};
use crate::hypersurface::check_closed_manifold;
use crate::models::Model;

use super::{PartitionCertificate, Piece};

/// What a passing check established.
#[derive(Clone, Debug, Serialize)]
pub struct GluingReport {
    pub pieces: usize,
    pub source_chambers: usize,
    pub cap_chambers: usize,
    /// Chamber orientation of every piece (contours first, then remainder) that
    /// makes the pieces sum to the source cycle.
    #[serde(skip)]
    pub signs: Vec<Vec<i8>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::CertificateInvalid(msg.into())
}

/// Checks gluing soundness and interior disjointness of a certificate.
///
/// Every piece must be a closed manifold mapped into the model. Every source
/// chamber must be used by exactly one piece, every cap chamber by exactly two,
/// with images matching vertex by vertex. The pieces must admit orientations
/// that agree with the source on source chambers and cancel on cap chambers,
/// and their oriented images must add up to the image cycle of the source.
pub fn check_certificate(cert: &PartitionCertificate, model: &Model) -> Result<GluingReport> {
    let src = &cert.source.map;
    let src_orient = orient_chambers(&src.domain).ok_or_else(|| bad("source is not orientable"))?;
    let pieces: Vec<&Piece> = cert.contours.iter().chain(&cert.remainder).collect();
    let mut src_used = vec![0u32; src.domain.num_chambers()];
    let mut cap_used: Vec<Vec<Vec<(usize, usize)>>> =
        cert.caps.iter().map(|c| vec![Vec::new(); c.disk.map.domain.num_chambers()]).collect();

    // per piece: chamber orientation and component index
    let mut orient = Vec::with_capacity(pieces.len());
    let mut comp_of = Vec::with_capacity(pieces.len());
    let mut n_vars = 0usize;
    for (pi, p) in pieces.iter().enumerate() {
        let map = &p.surface.map;
        map.validate(&model.complex).map_err(|e| bad(format!("piece {pi}: {e}")))?;
        check_closed_manifold(&map.domain).map_err(|e| bad(format!("piece {pi}: {e}")))?;
        if p.origins.len() != map.domain.num_chambers() {
            return Err(bad(format!("piece {pi}: {} origins for {} chambers", p.origins.len(), map.domain.num_chambers())));
        }
        for (c, o) in p.origins.iter().enumerate() {
            let ch = map.domain.chamber(c as u32);
            if o.verts.len() != ch.len() {
                return Err(bad(format!("piece {pi} chamber {c}: origin has the wrong size")));
            }
            let (dom, image) = match o.cap {
                None => (&*src.domain, &src.image),
                Some(id) => {
                    let cap = cert.caps.get(id as usize).ok_or_else(|| bad(format!("piece {pi}: no cap {id}")))?;
                    (&*cap.disk.map.domain, &cap.disk.map.image)
                }
            };
            if o.chamber as usize >= dom.num_chambers() {
                return Err(bad(format!("piece {pi} chamber {c}: origin chamber out of range")));
            }
            let mut sorted = o.verts.clone();
            sorted.sort_unstable();
            if sorted != dom.chamber(o.chamber) {
                return Err(bad(format!("piece {pi} chamber {c}: origin vertices do not form the origin chamber")));
            }
            for (j, &v) in ch.iter().enumerate() {
                if map.image[v as usize] != image[o.verts[j] as usize] {
                    return Err(bad(format!("piece {pi} chamber {c}: image differs from its origin")));
                }
            }
            match o.cap {
                None => src_used[o.chamber as usize] += 1,
                Some(id) => cap_used[id as usize][o.chamber as usize].push((pi, c)),
            }
        }
        let o = orient_chambers(&map.domain).ok_or_else(|| bad(format!("piece {pi} is not orientable")))?;
        let mut comp = vec![0usize; o.len()];
        for chambers in map.domain.chamber_components() {
            for c in chambers {
                comp[c as usize] = n_vars;
            }
            n_vars += 1;
        }
        orient.push(o);
        comp_of.push(comp);
    }
    if let Some(c) = src_used.iter().position(|&n| n != 1) {
        return Err(bad(format!("source chamber {c} used {} times", src_used[c])));
    }
    for (id, uses) in cap_used.iter().enumerate() {
        if let Some(c) = uses.iter().position(|u| u.len() != 2) {
            return Err(bad(format!("cap {id} chamber {c} used {} times", uses[c].len())));
        }
    }

    // induced sign of piece chamber (pi, c) on its origin chamber, before the component flip
    let induced = |pi: usize, c: usize| orient[pi][c] * sort_sign(&pieces[pi].origins[c].verts);
    let mut flip = vec![0i8; n_vars];
    let mut links: Vec<Vec<(usize, i8)>> = vec![Vec::new(); n_vars];
    for uses in cap_used.iter().flatten() {
        let (a, b) = (uses[0], uses[1]);
        let (va, vb) = (comp_of[a.0][a.1], comp_of[b.0][b.1]);
        // flip[va]·induced(a) = −flip[vb]·induced(b)
        let rel = -induced(a.0, a.1) * induced(b.0, b.1);
        links[va].push((vb, rel));
        links[vb].push((va, rel));
    }
    let mut fixed: Vec<Option<i8>> = vec![None; n_vars];
    for (pi, p) in pieces.iter().enumerate() {
        for (c, o) in p.origins.iter().enumerate() {
            if o.cap.is_none() {
                let want = src_orient[o.chamber as usize] * induced(pi, c);
                let v = comp_of[pi][c];
                match fixed[v] {
                    None => fixed[v] = Some(want),
                    Some(s) if s != want => return Err(bad(format!("piece {pi} disagrees with the source orientation"))),
                    _ => {}
                }
            }
        }
    }
    let order: Vec<usize> = (0..n_vars).filter(|&v| fixed[v].is_some()).chain(0..n_vars).collect();
    for start in order {
        if flip[start] != 0 {
            continue;
        }
        flip[start] = fixed[start].unwrap_or(1);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, rel) in &links[v] {
                let want = flip[v] * rel;
                if flip[w] == 0 {
                    if fixed[w].is_some_and(|s| s != want) {
                        return Err(bad("cap orientations conflict with the source"));
                    }
                    flip[w] = want;
                    queue.push_back(w);
                } else if flip[w] != want {
                    return Err(bad("cap chambers do not cancel"));
                }
            }
        }
    }

    let signs: Vec<Vec<i8>> = (0..pieces.len())
        .map(|pi| orient[pi].iter().enumerate().map(|(c, &s)| s * flip[comp_of[pi][c]]).collect())
        .collect();
    let mut total = Chain::default();
    for (pi, p) in pieces.iter().enumerate() {
        total.add(&p.surface.map.image_chain(&signs[pi]));
    }
    let mut expected = src.image_chain(&src_orient);
    expected.negate();
    total.add(&expected);
    if !total.is_zero() {
        return Err(bad("pieces do not add up to the source cycle"));
    }
    Ok(GluingReport {
        pieces: pieces.len(),
        source_chambers: src_used.len(),
        cap_chambers: cap_used.iter().map(Vec::len).sum(),
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::surgery::surgery;
    use crate::hypersurface::GrowthProfile;
    use crate::models::{boundary_sphere, generate, ModelKind, ModelSpec};

    fn face_cut() -> (Model, PartitionCertificate) {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 8).margin(2)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([2, 2, 2]).unwrap(), 4).unwrap();
        let y = (0..h.map.image.len() as u32).find(|&v| m.point(h.map.image[v as usize]) == Some([4, 4, 2])).unwrap();
        let region = GrowthProfile::compute(&h.map, &m.metric, y).chambers(1);
        let mut cert = PartitionCertificate::new("test", &h);
        let split = surgery(&m, &Piece::root(&h), &[region], &mut cert.caps).unwrap();
        cert.contours = split.contours;
        cert.remainder = split.remainder;
        (m, cert)
    }

    #[test]
    fn accepts_a_sound_cut() {
        let (m, cert) = face_cut();
        let rep = check_certificate(&cert, &m).unwrap();
        assert_eq!(rep.pieces, 2);
        assert_eq!(rep.source_chambers, cert.source.map.domain.num_chambers());
    }

    #[test]
    fn rejects_a_dropped_chamber() {
        let (m, mut cert) = face_cut();
        cert.contours[0].origins[0].chamber = cert.remainder[0].origins[0].chamber;
        assert!(matches!(check_certificate(&cert, &m), Err(Error::CertificateInvalid(_))));
    }

    #[test]
    fn survives_a_json_round_trip() {
        let (m, cert) = face_cut();
        let back = PartitionCertificate::from_json(&cert.to_json().unwrap(), &m).unwrap();
        assert_eq!(back.contours.len(), 1);
        check_certificate(&back, &m).unwrap();
    }
}
