//! Splitting an unfolded union along volume-free annuli.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::hypersurface::{folded_set, GrowthProfile, Hypersurface};
use crate::models::Model;

use super::surgery::surgery;
use super::{require_surface, vol_root, Assertion, Cap, PartitionCertificate, Piece, Stage};

/// Splits an unfolded work piece into at most `⌈2/(εδ^k)⌉` unfolded pieces.
pub(crate) fn thickround(model: &Model, root: &Piece, eps: f64, delta: f64, caps: &mut Vec<Cap>) -> Result<Stage> {
    require_surface(&root.surface)?;
    let k = root.surface.k();
    let kf = k as i32;
    let vol = root.volume();
    let metric = &model.metric;
    let mut out = Stage::default();
    out.constants.insert("eps".into(), eps);
    out.constants.insert("delta".into(), delta);
    if vol == 0 {
        out.remainder.push(root.clone());
        return Ok(out);
    }
    let w = 24.0 * delta * vol_root(vol, k);
    if w < 6.0 {
        return Err(Error::InvalidSpec(format!("volume {vol} too small: annulus width {w:.2} < 6")));
    }
    let scale = 6.0 * delta * vol_root(vol, k);
    let hi = 17.0 * w / (eps * delta.powi(kf));
    let n_max = (2.0 / (eps * delta.powi(kf))).ceil();
    out.constants.insert("W".into(), w);
    out.constants.insert("N".into(), n_max);
    let before = folded_set(&root.surface.map, metric, eps, scale);
    out.assertions.push(Assertion::le("thickround.input_unfolded", before.len() as f64, 0.0));

    let mut queue: VecDeque<Piece> = VecDeque::new();
    for p in root.components(model)? {
        if p.volume() > 0 {
            queue.push_back(p);
        } else {
            out.remainder.push(p);
        }
    }
    let guard = vol + 1;
    let mut rounds = 0;
    while let Some(p) = queue.pop_front() {
        rounds += 1;
        if rounds > guard {
            return Err(Error::NonTerminating(guard));
        }
        let map = &p.surface.map;
        let v = map.volume_vertices()[0];
        let prof = GrowthProfile::compute(map, metric, v);
        let (lo, top) = (w.ceil() as i64, hi.floor() as i64);
        let sat = prof.saturation() as i64;
        let t = (lo..=top.min(sat.max(lo)))
            .find(|&t| prof.volume_at((t as f64 + w).floor() as i64) == prof.volume_at(t))
            .ok_or(Error::NoEmptyAnnulus { lo: lo as u32, hi: top as u32 })?;
        let region = prof.chambers((t as f64 + w / 2.0).floor() as i64);
        if region.len() == map.domain.num_chambers() {
            out.contours.push(p);
            continue;
        }
        let split = surgery(model, &p, &[region], caps)?;
        out.contours.extend(split.contours);
        for q in split.remainder {
            if q.volume() > 0 {
                queue.push_back(q);
            } else {
                out.remainder.push(q);
            }
        }
    }

    let vols: Vec<f64> = out.contours.iter().map(|p| p.volume() as f64).collect();
    out.assertions.push(Assertion::le("thickround.count", out.contours.len() as f64, n_max));
    out.worst_ge("thickround.3_lower", vols.iter().map(|&v| (v, eps * delta.powi(kf) / 2.0 * vol as f64)));
    out.worst_le("thickround.3_upper", vols.iter().map(|&v| (v, vol as f64)));
    let folded_left: usize = out.contours.iter().map(|p| folded_set(&p.surface.map, metric, eps, scale).len()).sum();
    out.assertions.push(Assertion::le("thickround.1_unfolded", folded_left as f64, 0.0));
    let kappa = out
        .contours
        .iter()
        .map(|p| p.surface.diameter(metric) as f64 * eps * delta.powi(kf - 1) / vol_root(vol, k))
        .fold(0.0, f64::max);
    out.constants.insert("kappa".into(), kappa);
    Ok(out)
}

/// Unfolded-to-round splitting of `r`.
pub fn unfolded_to_round(model: &Model, r: &Hypersurface, eps: f64, delta: f64) -> Result<PartitionCertificate> {
    let mut caps = Vec::new();
    let stage = thickround(model, &Piece::root(r), eps, delta, &mut caps)?;
    Ok(stage.into_certificate("thickround", r, caps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{boundary_sphere, disjoint_union, dumbbell_sphere, generate, BulbShape, DumbbellParams, ModelKind, ModelSpec};

    #[test]
    fn two_far_spheres_split_in_two() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 0).margin(1).extent(vec![40, 4, 4])).unwrap();
        let a = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), 2).unwrap();
        let b = boundary_sphere(&m, m.vertex_at([36, 1, 1]).unwrap(), 2).unwrap();
        let u = disjoint_union(&m, &[a, b]).unwrap();
        let cert = unfolded_to_round(&m, &u, 0.5, 0.25).unwrap();
        assert!(cert.all_passed(), "{:?}", cert.failures());
        assert_eq!(cert.contours.len(), 2);
        assert!(cert.caps.is_empty());
        cert.check(&m).unwrap();
    }

    #[test]
    fn a_round_sphere_stays_whole() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 4).margin(1)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), 2).unwrap();
        let cert = unfolded_to_round(&m, &h, 0.5, 0.25).unwrap();
        assert_eq!(cert.contours.len(), 1);
        assert_eq!(cert.contours[0].volume(), h.volume());
        assert!(matches!(unfolded_to_round(&m, &h, 0.5, 0.03), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn dumbbell_splits_at_the_neck() {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Box([2, 2, 2]), 60);
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 0).margin(1).extent(p.extent(1))).unwrap();
        let h = dumbbell_sphere(&m, &p).unwrap();
        let cert = unfolded_to_round(&m, &h, 0.5, 0.1).unwrap();
        assert!(cert.all_passed(), "{:?}", cert.failures());
        assert_eq!(cert.contours.len(), 2);
        assert_eq!(cert.contour_volume(), h.volume());
        cert.check(&m).unwrap();
    }
}
