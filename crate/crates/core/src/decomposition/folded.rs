//! Removing folded parts, and iterating that until the remainder is unfolded.

use std::cmp::Reverse;

use rayon::prelude::*;

use crate::complex::{ChamberSet, Metric, VertexId};
use crate::error::{Error, Result};
use crate::hypersurface::folded::folded_threshold;
use crate::hypersurface::{folded_set, GrowthProfile, Hypersurface};
use crate::models::Model;

use super::surgery::surgery;
use super::{
    frontier_volume, overlapping_pairs, require_surface, vertices_of, vol_root, Assertion, Cap, CriticalRadii,
    PartitionCertificate, Piece, Stage,
};

/// `k(k+1)3^(k-1)`.
pub fn boundary_constant(k: usize) -> f64 {
    (k * (k + 1)) as f64 * 3f64.powi(k as i32 - 1)
}

/// `(R_*, r_*, r)` from a growth profile, or `None` when the vertex is not folded.
fn radii_of(p: &GrowthProfile, eps: f64, rho: f64, k: usize) -> Option<(u32, u32, u32)> {
    let v = |r: i64| p.volume_at(r) as f64;
    let thr = |r: i64| folded_threshold(eps, r as f64, k);
    let top = rho.floor() as i64;
    let big = (1..=top).find(|&r| v(r) < thr(r)).or_else(|| (1..=top).find(|&r| v(r) <= thr(r)))?;
    let star = (1..=big).rev().find(|&r| v(r) > eps * (r as f64).powi(k as i32)).unwrap_or(1);
    Some((big as u32, star as u32, star as u32 + 1))
}

/// The lemma's checks at one vertex.
fn radius_checks(h: &Hypersurface, p: &GrowthProfile, eps: f64, r: u32) -> [Assertion; 3] {
    let k = h.k();
    let v = |r: i64| p.volume_at(r) as f64;
    let r = r as i64;
    let boundary = frontier_volume(&h.map, &p.chambers(r)) as f64;
    [
        Assertion::le("ry.b1", v(6 * r), 12f64.powi(k as i32) * v(r)),
        Assertion::le("ry.b2", v(r), eps * (r as f64).powi(k as i32)),
        Assertion::le(
            "ry.b3",
            boundary,
            boundary_constant(k) * eps.powf(1.0 / k as f64) * v(r).powf((k as f64 - 1.0) / k as f64),
        ),
    ]
}

/// `(R_*(y), r_*(y), r(y))` for a folded vertex, with the lemma's checks on the result.
pub fn critical_radius(
    h: &Hypersurface,
    metric: &Metric,
    y: VertexId,
    eps: f64,
    rho: f64,
) -> Result<(CriticalRadii, Vec<Assertion>)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidSpec(format!("eps = {eps} must lie in (0, 1)")));
    }
    if h.map.volume_vertices().binary_search(&y).is_err() {
        return Err(Error::NotFoldedVertex(y));
    }
    let p = GrowthProfile::compute(&h.map, metric, y);
    let (big_r, r_star, r) = radii_of(&p, eps, rho, h.k()).ok_or(Error::NotFoldedVertex(y))?;
    let mut checks = radius_checks(h, &p, eps, r).to_vec();
    checks.push(Assertion::le("ry.r_star_below_R_over_12", r_star as f64, big_r as f64 / 12.0 - 1e-6));
    Ok((CriticalRadii::Folded { y, big_r, r_star, r }, checks))
}

/// One removal of folded parts from a work piece at scale `rho`.
pub(crate) fn remove_folded_step(model: &Model, work: &Piece, eps: f64, rho: f64, caps: &mut Vec<Cap>) -> Result<Stage> {
    let h = &work.surface;
    require_surface(h)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidSpec(format!("eps = {eps} must lie in (0, 1)")));
    }
    let k = h.k();
    let kf = k as i32;
    let metric = &model.metric;
    let mut stage = Stage::default();
    stage.constants.insert("eps".into(), eps);
    stage.constants.insert("rho".into(), rho);
    let folded = folded_set(&h.map, metric, eps, rho);
    stage.constants.insert("folded".into(), folded.len() as f64);
    if folded.is_empty() {
        stage.remainder.push(work.clone());
        return Ok(stage);
    }
    let found: Vec<(VertexId, GrowthProfile, (u32, u32, u32))> = folded
        .members
        .par_iter()
        .map(|&y| {
            let p = GrowthProfile::compute(&h.map, metric, y);
            let radii = radii_of(&p, eps, rho, k).ok_or(Error::NotFoldedVertex(y))?;
            Ok((y, p, radii))
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by_key(|&i| (Reverse(found[i].2 .2), found[i].0));
    let mut excluded = vec![false; h.map.domain.num_vertices()];
    let mut picked = Vec::new();
    for i in order {
        let (y, p, (_, _, r)) = &found[i];
        if excluded[*y as usize] {
            continue;
        }
        for (e, reach) in excluded.iter_mut().zip(vertices_of(&h.map, &p.chambers(6 * *r as i64))) {
            *e |= reach;
        }
        picked.push(i);
    }
    let regions: Vec<ChamberSet> = picked.iter().map(|&i| found[i].1.chambers(found[i].2 .2 as i64)).collect();
    let doubled: Vec<ChamberSet> = picked.iter().map(|&i| found[i].1.chambers(2 * found[i].2 .2 as i64)).collect();
    let split = surgery(model, work, &regions, caps)?;

    let card = folded.len() as f64;
    let low = 1.0 / (2.0 * 12f64.powi(kf));
    let vr: Vec<(f64, f64)> = picked
        .iter()
        .map(|&i| (found[i].1.volume_at(found[i].2 .2 as i64) as f64, found[i].2 .2 as f64))
        .collect();
    stage.worst_ge("thin.s1_lower", vr.iter().map(|&(v, r)| (v, low * eps * r.powi(kf))));
    stage.worst_le("thin.s1_upper", vr.iter().map(|&(v, r)| (v, eps * r.powi(kf))));
    stage.worst_le("thin.s2", vr.iter().map(|&(_, r)| (r, rho / 6.0)));
    stage.assertions.push(Assertion::le("thin.s3", overlapping_pairs(&doubled) as f64, 0.0));
    stage.worst_le(
        "thin.s4",
        picked.iter().zip(&regions).zip(&vr).map(|((_, reg), &(v, _))| {
            (frontier_volume(&h.map, reg) as f64, boundary_constant(k) * eps.powf(1.0 / k as f64) * v.powf((k as f64 - 1.0) / k as f64))
        }),
    );
    stage.assertions.push(Assertion::ge("thin.s5", vr.iter().map(|p| p.0).sum(), low * card));
    for &i in &picked {
        let [b1, b2, b3] = radius_checks(h, &found[i].1, eps, found[i].2 .2);
        stage.assertions.extend([b1, b2, b3]);
    }

    let vols: Vec<f64> = split.contours.iter().map(|p| p.volume() as f64).collect();
    let sum: f64 = vols.iter().sum();
    let rest: usize = split.remainder.iter().map(Piece::volume).sum();
    stage.worst_ge("thin.1_positive", vols.iter().map(|&v| (v, 1.0)));
    stage.worst_le("thin.1_upper", vols.iter().map(|&v| (v, 2.0 * eps * rho.powi(kf) / 6f64.powi(kf))));
    stage.assertions.push(Assertion::ge("thin.3", sum, low * card));
    stage.assertions.push(Assertion::le("thin.4", rest as f64 + sum / 2.0, h.volume() as f64));
    let sigma = split
        .contours
        .iter()
        .filter(|p| p.volume() > 0)
        .map(|p| p.surface.diameter(metric) as f64 * eps.powf(1.0 / k as f64) / vol_root(p.volume(), k))
        .fold(0.0, f64::max);
    stage.constants.insert("sigma".into(), sigma);
    stage.radii = picked
        .iter()
        .map(|&i| {
            let (y, _, (big_r, r_star, r)) = found[i];
            CriticalRadii::Folded { y, big_r, r_star, r }
        })
        .collect();
    stage.contours = split.contours;
    stage.remainder = split.remainder;
    Ok(stage)
}

/// Removal of the ε-folded part of `h` at scale `rho`.
pub fn remove_folded(model: &Model, h: &Hypersurface, eps: f64, rho: f64) -> Result<PartitionCertificate> {
    let mut caps = Vec::new();
    let stage = remove_folded_step(model, &Piece::root(h), eps, rho, &mut caps)?;
    Ok(stage.into_certificate("folded", h, caps))
}

/// Repeated removal with `ρ = 6δ Vol(r)^(1/k)` until the remainder is unfolded.
pub(crate) fn thickthin(model: &Model, root: &Piece, eps: f64, delta: f64, caps: &mut Vec<Cap>) -> Result<Stage> {
    require_surface(&root.surface)?;
    let k = root.surface.k();
    let vol = root.volume();
    let metric = &model.metric;
    let mut out = Stage::default();
    out.constants.insert("eps".into(), eps);
    out.constants.insert("delta".into(), delta);
    let budget = vol.max(1);
    let mut work = Some(root.clone());
    let mut live: Option<Piece> = None;
    let (mut sigma, mut steps) = (0.0f64, 0usize);
    while let Some(w) = work.take() {
        if w.volume() == 0 {
            out.remainder.push(w);
            break;
        }
        if steps >= budget {
            return Err(Error::NonTerminating(budget));
        }
        let rho = 6.0 * delta * vol_root(w.volume(), k);
        let mut st = remove_folded_step(model, &w, eps, rho, caps)?;
        steps += 1;
        if st.contours.is_empty() {
            live = Some(w);
            break;
        }
        sigma = sigma.max(st.constants.get("sigma").copied().unwrap_or(0.0));
        out.absorb_checks(&format!("step{}.", steps - 1), &mut st);
        out.contours.append(&mut st.contours);
        let (pos, dead): (Vec<Piece>, Vec<Piece>) = st.remainder.into_iter().partition(|p| p.volume() > 0);
        out.remainder.extend(dead);
        work = Piece::union(model, &pos)?;
    }
    let rest = live.as_ref().map_or(0, Piece::volume);
    if let Some(r) = &live {
        let scale = 6.0 * delta * vol_root(rest, k);
        let left = folded_set(&r.surface.map, metric, eps, scale);
        out.assertions.push(Assertion::le("thickthin.1_unfolded", left.len() as f64, 0.0));
        out.remainder.extend(r.components(model)?);
    }
    let vols: Vec<f64> = out.contours.iter().map(|p| p.volume() as f64).collect();
    out.worst_ge("thickthin.2_positive", vols.iter().map(|&v| (v, 1.0)));
    out.worst_le("thickthin.2_upper", vols.iter().map(|&v| (v, 2.0 * delta.powi(k as i32) * eps * vol as f64)));
    out.assertions.push(Assertion::le("thickthin.4", rest as f64 + vols.iter().sum::<f64>() / 2.0, vol as f64));
    out.constants.insert("sigma".into(), sigma);
    out.constants.insert("iterations".into(), steps as f64);
    Ok(out)
}

/// Folded-unfolded decomposition of `h`.
pub fn folded_unfolded_decomposition(model: &Model, h: &Hypersurface, eps: f64, delta: f64) -> Result<PartitionCertificate> {
    let mut caps = Vec::new();
    let stage = thickthin(model, &Piece::root(h), eps, delta, &mut caps)?;
    Ok(stage.into_certificate("thickthin", h, caps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{boundary_sphere, dumbbell_sphere, generate, BulbShape, DumbbellParams, ModelKind, ModelSpec};

    fn long_neck() -> (Model, Hypersurface) {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Tetra, 60);
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 0).margin(1).extent(p.extent(1))).unwrap();
        let h = dumbbell_sphere(&m, &p).unwrap();
        (m, h)
    }

    #[test]
    fn lemma_bounds_at_a_bulb() {
        let (m, h) = long_neck();
        let fs = folded_set(&h.map, &m.metric, 0.5, 50.0);
        assert!(!fs.is_empty());
        for &y in &fs.members {
            let (radii, checks) = critical_radius(&h, &m.metric, y, 0.5, 50.0).unwrap();
            let CriticalRadii::Folded { big_r, r_star, r, .. } = radii else { panic!() };
            assert_eq!(r, r_star + 1);
            assert!(12 * r_star < big_r);
            assert!(checks.iter().all(|a| a.pass), "{checks:?}");
        }
        let not = (0..h.map.domain.num_vertices() as u32).find(|v| !fs.contains(*v)).unwrap();
        assert!(matches!(critical_radius(&h, &m.metric, not, 0.5, 50.0), Err(Error::NotFoldedVertex(_))));
    }

    #[test]
    fn removal_on_a_long_neck() {
        let (m, h) = long_neck();
        let cert = remove_folded(&m, &h, 0.5, 50.0).unwrap();
        assert!(cert.all_passed(), "{:?}", cert.failures());
        assert_eq!(cert.contours.len(), 2);
        cert.check(&m).unwrap();
    }

    #[test]
    fn unfolded_input_is_left_alone() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 6).margin(1)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([1, 1, 1]).unwrap(), 4).unwrap();
        let cert = remove_folded(&m, &h, 0.1, 20.0).unwrap();
        assert!(cert.contours.is_empty());
        assert_eq!(cert.remainder_volume(), h.volume());
        let tt = folded_unfolded_decomposition(&m, &h, 0.1, 0.5).unwrap();
        assert!(tt.all_passed());
        assert!(tt.contours.is_empty());
        tt.check(&m).unwrap();
    }
}
