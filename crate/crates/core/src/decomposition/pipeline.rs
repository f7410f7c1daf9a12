//! Filling through the partition pipeline: round, then folded-unfolded, then unfolded-to-round.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filling::{oracle_fill, solve_chain, ChainFill, FillMethod, FillResult, Filling};
use crate::hypersurface::Hypersurface;
use crate::models::Model;

use super::folded::thickthin;
use super::round::round_full;
use super::thickround::thickround;
use super::{require_surface, Assertion, PartitionCertificate, Piece, Stage};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// ε of the round partition.
    pub eps_round: f64,
    /// ε of the folded and unfolded stages.
    pub eps: f64,
    pub delta: f64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self { eps_round: 0.5, eps: 0.1, delta: 0.25 }
    }
}

/// Assembled fill together with the certificate it was assembled from.
#[derive(Clone, Debug)]
pub struct PipelineFill {
    pub result: FillResult,
    /// Direct oracle value for comparison; `None` when the oracle reports no fill.
    pub oracle: Option<u64>,
    pub certificate: PartitionCertificate,
    /// Pieces filled separately.
    pub terminal: usize,
}

impl PipelineFill {
    pub fn ratio(&self) -> Option<f64> {
        match (self.result.volume, self.oracle) {
            (Some(a), Some(o)) if o > 0 => Some(a as f64 / o as f64),
            (Some(0), Some(0)) => Some(1.0),
            _ => None,
        }
    }
}

/// Partitions `h`, fills every terminal piece exactly and adds the volumes up.
pub fn pipeline_fill(model: &Model, h: &Hypersurface, params: &PipelineParams) -> Result<PipelineFill> {
    require_surface(h)?;
    if !model.is_grid() {
        return Err(Error::UnsupportedAmbient);
    }
    let mut caps = Vec::new();
    let mut all = Stage::default();
    let mut round = round_full(model, &Piece::root(h), params.eps_round, &mut caps)?;
    all.absorb_checks("round.", &mut round);
    all.remainder.append(&mut round.remainder);
    let mut unfolded = Vec::new();
    for (i, c) in round.contours.iter().enumerate() {
        let mut tt = thickthin(model, c, params.eps, params.delta, &mut caps)?;
        all.absorb_checks(&format!("thickthin{i}."), &mut tt);
        all.contours.append(&mut tt.contours);
        let (pos, dead): (Vec<Piece>, Vec<Piece>) = tt.remainder.into_iter().partition(|p| p.volume() > 0);
        all.remainder.extend(dead);
        unfolded.extend(pos);
    }
    for (i, u) in unfolded.iter().enumerate() {
        // too small to split: already a terminal piece
        let w = 24.0 * params.delta * super::vol_root(u.volume(), 2);
        if w < 6.0 {
            all.contours.push(u.clone());
            continue;
        }
        let mut tr = thickround(model, u, params.eps, params.delta, &mut caps)?;
        all.absorb_checks(&format!("thickround{i}."), &mut tr);
        all.contours.append(&mut tr.contours);
        all.remainder.append(&mut tr.remainder);
    }
    all.constants.insert("eps_round".into(), params.eps_round);
    all.constants.insert("eps".into(), params.eps);
    all.constants.insert("delta".into(), params.delta);
    let mut cert = all.into_certificate("pipeline", h, caps);
    let report = cert.check(model)?;

    let pieces: Vec<&Piece> = cert.contours.iter().chain(&cert.remainder).collect();
    let mut fills: Vec<ChainFill> = Vec::new();
    let mut infinite = false;
    for (p, signs) in pieces.iter().zip(&report.signs) {
        let z = p.surface.map.image_chain(signs);
        if z.is_zero() {
            continue;
        }
        match solve_chain(model, &z, None)? {
            Some(f) => fills.push(f),
            None => infinite = true,
        }
    }
    let oracle = oracle_fill(model, h, None)?.volume;
    let volume = (!infinite).then(|| fills.iter().map(ChainFill::mass).sum::<u64>());
    if let (Some(a), Some(o)) = (volume, oracle) {
        cert.assertions.push(Assertion::ge("pipeline.assembled_vs_oracle", a as f64, o as f64));
    }
    let result = FillResult {
        method: FillMethod::Heuristic,
        filling: if infinite { Filling::Infinite } else { Filling::Assembled(fills) },
        volume,
        radius: None,
        cone_constant: volume.map(|v| crate::filling::cone_constant(v, h, &model.metric)),
        optimality_certificate: false,
    };
    Ok(PipelineFill { result, oracle, terminal: pieces.len(), certificate: cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{boundary_sphere, constant_sphere, dumbbell_sphere, generate, BulbShape, DumbbellParams, ModelKind, ModelSpec};

    #[test]
    fn cube_pipeline_is_at_least_the_oracle() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 8).margin(2)).unwrap();
        let h = boundary_sphere(&m, m.vertex_at([2, 2, 2]).unwrap(), 4).unwrap();
        let out = pipeline_fill(&m, &h, &PipelineParams::default()).unwrap();
        assert_eq!(out.oracle, Some(384));
        assert!(out.result.volume.unwrap() >= 384);
        assert!(out.certificate.all_passed(), "{:?}", out.certificate.failures());
    }

    #[test]
    fn flat_sphere_fills_with_nothing() {
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 4).margin(1)).unwrap();
        let h = constant_sphere(&m, m.vertex_at([2, 2, 2]).unwrap()).unwrap();
        let out = pipeline_fill(&m, &h, &PipelineParams::default()).unwrap();
        assert_eq!(out.result.volume, Some(0));
    }

    #[test]
    fn dumbbell_pipeline() {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Box([2, 2, 2]), 20);
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 0).margin(1).extent(p.extent(1))).unwrap();
        let h = dumbbell_sphere(&m, &p).unwrap();
        let out = pipeline_fill(&m, &h, &PipelineParams::default()).unwrap();
        assert_eq!(out.oracle, Some(96));
        assert!(out.result.volume.unwrap() >= 96);
        assert!(out.certificate.all_passed(), "{:?}", out.certificate.failures());
    }
}
