//! Round partitions: one greedy step, and the iteration until the remainder has no volume.

use std::cmp::Reverse;

use rayon::prelude::*;

use crate::complex::{ChamberSet, Metric, VertexId};
use crate::error::{Error, Result};
use crate::hypersurface::{GrowthProfile, Hypersurface};
use crate::models::Model;

use super::surgery::surgery;
use super::{overlapping_pairs, require_surface, spread, vertices_of, vol_root, Assertion, Cap, CriticalRadii, PartitionCertificate, Piece, Stage};

// halvings of λ tried before giving up
const LAMBDA_HALVINGS: u32 = 20;

/// `1 − 1/6^(k+1)`.
pub fn theta(k: usize) -> f64 {
    1.0 - 1.0 / 6f64.powi(k as i32 + 1)
}

/// Largest `r >= 1` with `Vol(h(y,r)) >= λ r^k`.
pub fn r0_radius(h: &Hypersurface, metric: &Metric, y: VertexId, lambda: f64) -> u32 {
    r0_of(&GrowthProfile::compute(&h.map, metric, y), lambda, h.k())
}

pub(crate) fn r0_of(p: &GrowthProfile, lambda: f64, k: usize) -> u32 {
    // past (total/λ)^(1/k) the growth can no longer keep up
    let top = ((p.total_volume().max(1) as f64 / lambda).powf(1.0 / k as f64)).floor() as i64 + 1;
    (1..=top).rev().find(|&r| p.volume_at(r) as f64 >= lambda * (r as f64).powi(k as i32)).unwrap_or(1) as u32
}

/// One round step on a work piece; new caps go to `caps`.
pub(crate) fn round_step(model: &Model, work: &Piece, eps: f64, caps: &mut Vec<Cap>) -> Result<Stage> {
    let h = &work.surface;
    require_surface(h)?;
    let k = h.k();
    let vol = h.volume();
    let mut stage = Stage::default();
    stage.constants.insert("eps".into(), eps);
    stage.constants.insert("theta".into(), theta(k));
    if vol == 0 {
        stage.remainder.push(work.clone());
        return Ok(stage);
    }
    let metric = &model.metric;
    let verts = h.map.volume_vertices();
    let profiles: Vec<GrowthProfile> = verts.par_iter().map(|&y| GrowthProfile::compute(&h.map, metric, y)).collect();
    let big_r = eps * vol_root(vol, k);
    let mut last = Vec::new();
    for halving in 0..=LAMBDA_HALVINGS {
        let lambda = 0.5f64.powi((k as u32 + halving) as i32);
        let r0: Vec<u32> = profiles.iter().map(|p| r0_of(p, lambda, k)).collect();
        let mut order: Vec<usize> = (0..verts.len()).collect();
        order.sort_by_key(|&i| (Reverse(r0[i]), verts[i]));
        let mut excluded = vec![false; h.map.domain.num_vertices()];
        let mut chosen: Vec<(usize, Vec<bool>)> = Vec::new();
        for i in order {
            if excluded[verts[i] as usize] {
                continue;
            }
            let reach = vertices_of(&h.map, &profiles[i].chambers(6 * r0[i] as i64));
            for (e, &r) in excluded.iter_mut().zip(&reach) {
                *e |= r;
            }
            chosen.push((i, reach));
        }
        // the whole volume sits in one M(y_j, 6r_j): keep that ball alone
        let single = chosen.iter().position(|(_, reach)| verts.iter().all(|&v| reach[v as usize]));
        let picked: Vec<usize> = match single {
            Some(j) => vec![chosen[j].0],
            None => chosen.iter().map(|c| c.0).collect(),
        };
        let regions: Vec<ChamberSet> = picked.iter().map(|&i| profiles[i].chambers(r0[i] as i64)).collect();
        let doubled: Vec<ChamberSet> = picked.iter().map(|&i| profiles[i].chambers(2 * r0[i] as i64)).collect();

        let mark = caps.len();
        let split = surgery(model, work, &regions, caps)?;
        let sum: usize = split.contours.iter().map(Piece::volume).sum();
        let rest: usize = split.remainder.iter().map(Piece::volume).sum();
        let all: Vec<&Piece> = split.contours.iter().chain(&split.remainder).collect();
        let checks = vec![
            Assertion::le("round.contour_volume", sum as f64, 2.0 * vol as f64),
            Assertion::le("round.remainder_volume", rest as f64, theta(k) * vol as f64),
            Assertion::le("round.neighborhood", spread(metric, h, &all) as f64, big_r),
        ];
        if checks.iter().all(|a| a.pass) {
            stage.assertions = checks;
            stage.assertions.push(Assertion::le("round.overlap_2r", overlapping_pairs(&doubled) as f64, 0.0));
            stage.assertions.push(Assertion::ge(
                "round.r0_at_least_2",
                picked.iter().map(|&i| r0[i]).min().unwrap_or(2) as f64,
                2.0,
            ));
            let eta = split
                .contours
                .iter()
                .filter(|p| p.volume() > 0)
                .map(|p| p.surface.diameter(metric) as f64 / vol_root(p.volume(), k))
                .fold(0.0, f64::max);
            stage.constants.insert("lambda".into(), lambda);
            stage.constants.insert("eta".into(), eta);
            stage.radii = picked.iter().map(|&i| CriticalRadii::Round { y: verts[i], r0: r0[i] }).collect();
            if single.is_some() {
                stage.flags.push("singleton".into());
            }
            stage.contours = split.contours;
            stage.remainder = split.remainder;
            return Ok(stage);
        }
        caps.truncate(mark);
        last = checks;
    }
    let failed: Vec<String> =
        last.iter().filter(|a| !a.pass).map(|a| format!("{} ({} > {})", a.name, a.measured, a.bound)).collect();
    Err(Error::AssertionFailed(format!("round step, smallest λ: {}", failed.join(", "))))
}

/// Round step on `h`.
pub fn round_partition_step(model: &Model, h: &Hypersurface, eps: f64) -> Result<PartitionCertificate> {
    let mut caps = Vec::new();
    let stage = round_step(model, &Piece::root(h), eps, &mut caps)?;
    Ok(stage.into_certificate("round", h, caps))
}

/// Iterates round steps on a work piece until the remainder has no volume.
pub(crate) fn round_full(model: &Model, root: &Piece, eps: f64, caps: &mut Vec<Cap>) -> Result<Stage> {
    require_surface(&root.surface)?;
    let k = root.surface.k();
    let vol = root.volume();
    let mut out = Stage::default();
    out.constants.insert("eps".into(), eps);
    out.constants.insert("theta".into(), theta(k));
    let cap = if vol == 0 { 1 } else { ((vol as f64).ln() / -theta(k).ln()).ceil() as usize + 2 };
    let mut work = Some(root.clone());
    let (mut eta, mut lambda, mut steps) = (0.0f64, 1.0f64, 0usize);
    while let Some(w) = work.take() {
        if w.volume() == 0 {
            out.remainder.push(w);
            break;
        }
        if steps >= cap {
            return Err(Error::NonTerminating(cap));
        }
        let before = w.volume();
        let mut st = round_step(model, &w, eps, caps)?;
        let after: usize = st.remainder.iter().map(Piece::volume).sum();
        if after as f64 > theta(k) * before as f64 + 1e-9 {
            return Err(Error::NonDecayingRemainder { before, after });
        }
        eta = eta.max(st.constants.get("eta").copied().unwrap_or(0.0));
        lambda = lambda.min(st.constants.get("lambda").copied().unwrap_or(1.0));
        out.absorb_checks(&format!("step{steps}."), &mut st);
        out.contours.append(&mut st.contours);
        let (live, dead): (Vec<Piece>, Vec<Piece>) = st.remainder.into_iter().partition(|p| p.volume() > 0);
        out.remainder.extend(dead);
        work = Piece::union(model, &live)?;
        steps += 1;
    }
    let sum: usize = out.contours.iter().map(Piece::volume).sum();
    out.assertions.push(Assertion::le("rounddec.contour_volume", sum as f64, 2.0 * 6f64.powi(k as i32 + 1) * vol as f64));
    let all: Vec<&Piece> = out.contours.iter().chain(&out.remainder).collect();
    out.assertions.push(Assertion::le(
        "rounddec.neighborhood",
        spread(&model.metric, &root.surface, &all) as f64,
        eps * vol_root(vol, k),
    ));
    out.constants.insert("eta".into(), eta);
    out.constants.insert("lambda".into(), lambda);
    out.constants.insert("iterations".into(), steps as f64);
    Ok(out)
}

/// Round partition of `h` into round contours and a volume-zero remainder.
pub fn round_partition_full(model: &Model, h: &Hypersurface, eps: f64) -> Result<PartitionCertificate> {
    let mut caps = Vec::new();
    let stage = round_full(model, &Piece::root(h), eps, &mut caps)?;
    Ok(stage.into_certificate("round-full", h, caps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{boundary_sphere, constant_sphere, dumbbell_sphere, generate, BulbShape, DumbbellParams, ModelKind, ModelSpec};

    #[test]
    fn r0_of_a_lonely_chamber() {
        // at most two triangles with volume, the rest squashed onto one corner
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 6).margin(1)).unwrap();
        let a = m.vertex_at([3, 3, 3]).unwrap();
        let b = m.vertex_at([4, 3, 3]).unwrap();
        let c = m.vertex_at([4, 4, 3]).unwrap();
        let oct = crate::models::subdivided_octahedron(0).unwrap();
        let image = vec![a, b, c, a, a, a];
        let map = crate::SimplicialMap::new(oct, image, &m.complex).unwrap();
        let h = Hypersurface::new(map, crate::SurfaceModel::Sphere).unwrap();
        assert!((1..=2).contains(&h.volume()));
        assert_eq!(r0_radius(&h, &m.metric, 0, 0.25), 2);
        assert_eq!(r0_radius(&h, &m.metric, 0, 1.0), 1);
    }

    #[test]
    fn volume_zero_is_all_remainder() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 4).margin(1)).unwrap();
        let h = constant_sphere(&m, m.vertex_at([2, 2, 2]).unwrap()).unwrap();
        let cert = round_partition_step(&m, &h, 0.5).unwrap();
        assert!(cert.contours.is_empty());
        assert_eq!(cert.remainder.len(), 1);
        cert.check(&m).unwrap();
    }

    #[test]
    fn cube_step_bounds() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 12).margin(2)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([2, 2, 2]).unwrap(), 8).unwrap();
        let cert = round_partition_step(&m, &h, 0.5).unwrap();
        assert!(cert.all_passed(), "{:?}", cert.failures());
        assert!(cert.contour_volume() <= 2 * h.volume());
        cert.check(&m).unwrap();
        let full = round_partition_full(&m, &h, 0.5).unwrap();
        assert!(full.all_passed());
        assert_eq!(full.remainder_volume(), 0);
        full.check(&m).unwrap();
    }

    #[test]
    fn dumbbell_bulbs_become_contours() {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Box([2, 2, 2]), 30);
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 0).margin(1).extent(p.extent(1))).unwrap();
        let h = dumbbell_sphere(&m, &p).unwrap();
        let cert = round_partition_full(&m, &h, 0.5).unwrap();
        assert!(cert.all_passed(), "{:?}", cert.failures());
        assert_eq!(cert.contours.len(), 2);
        assert_eq!(cert.remainder_volume(), 0);
        cert.check(&m).unwrap();
    }
}
