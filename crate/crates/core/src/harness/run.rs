//! Running an experiment config end to end.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{VertexId, UNREACHABLE};
use crate::decomposition::{
    critical_radius, folded_unfolded_decomposition, pipeline_fill, remove_folded, round_partition_full, Assertion,
    PartitionCertificate, PipelineParams,
};
use crate::divergence::{div_profile, near_family, pair_family, DivSample, DivTarget, DivergenceProfile, RoundFilter};
use crate::error::{Error, Result};
use crate::filling::{cone_constant, fill, growth_violations, radius_growth_profile, FillMethod, Filling};
use crate::hypersurface::{folded_set, FillingDomain, Hypersurface};
use crate::models::{
    boundary_sphere, dumbbell_sphere, generate, perturbed_sphere, square_loop, BulbShape, DumbbellParams,
    Model,
};

use super::config::{ExperimentConfig, ExperimentKind, Family};
use super::fit::{fit_exponent, ols, Fit};
use super::plot::{emit_plot, Axes, Series};
use super::record::{write_csv_file, ExperimentRecord};

/// Fits, constants and run-level checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub fits: BTreeMap<String, Fit>,
    pub constants: BTreeMap<String, f64>,
    pub checks: Vec<Assertion>,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutput {
    pub config_hash: String,
    pub records: Vec<ExperimentRecord>,
    pub summary: Summary,
}

impl RunOutput {
    /// No record and no run-level check failed.
    pub fn ok(&self) -> bool {
        self.summary.failed == 0
    }

    fn finish(mut self) -> Self {
        self.records.sort_by(|a, b| (&a.experiment, a.size, a.sample_id).cmp(&(&b.experiment, b.size, b.sample_id)));
        let s = &mut self.summary;
        s.passed = self.records.iter().map(|r| r.passed).sum::<usize>() + s.checks.iter().filter(|a| a.pass).count();
        s.failed = self.records.iter().map(|r| r.failed).sum::<usize>() + s.checks.iter().filter(|a| !a.pass).count();
        self
    }

    /// `(x, value)` per size: the largest `Vol^(1/k)` and the largest finite value over the samples.
    pub fn per_size(&self, experiment: &str) -> Vec<(u32, f64, Option<u64>)> {
        let mut out: BTreeMap<u32, (f64, Option<u64>)> = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.experiment == experiment) {
            let x = if r.k == 0 { r.size as f64 } else { (r.vol as f64).powf(1.0 / r.k as f64) };
            let e = out.entry(r.size).or_insert((0.0, None));
            e.0 = e.0.max(x);
            if let Some(v) = r.value {
                e.1 = Some(e.1.map_or(v, |w| w.max(v)));
            }
        }
        out.into_iter().map(|(s, (x, v))| (s, x, v)).collect()
    }
}

/// Dumbbell construction used by the dumbbell families.
pub fn dumbbell(family: Family, neck: u32, margin: u32) -> DumbbellParams {
    let m = margin as i32;
    let bulb = if family == Family::TetraDumbbell { BulbShape::Tetra } else { BulbShape::Box([2, 2, 2]) };
    DumbbellParams::new([m, m, m], bulb, neck)
}

/// The hypersurfaces of one size, with their sample ids.
pub fn family_members(model: &Model, cfg: &ExperimentConfig, size: u32) -> Result<Vec<(u32, Hypersurface)>> {
    let m = cfg.margin as i32;
    match cfg.family {
        Family::Square => Ok(vec![(0, square_loop(model, model.vertex_at([m, m, 0])?, size)?)]),
        Family::Cube => Ok(vec![(0, boundary_sphere(model, model.vertex_at([m, m, m])?, size)?)]),
        Family::Perturbed => {
            let corner = model.vertex_at([m + 1, m + 1, m + 1])?;
            (0..cfg.samples).map(|i| Ok((i, perturbed_sphere(model, corner, size, cfg.seed + i as u64)?.0))).collect()
        }
        Family::Dumbbell | Family::TetraDumbbell => Ok(vec![(0, dumbbell_sphere(model, &dumbbell(cfg.family, size, cfg.margin))?)]),
        Family::Pair | Family::NearLoop => Err(Error::Config("this family only has divergence samples".into())),
    }
}

/// Center for the near-loop family: far enough in that the largest loop fits.
fn near_center(cfg: &ExperimentConfig) -> [i32; 3] {
    let top = *cfg.sizes.last().expect("validated") as i32;
    let m = cfg.margin as i32;
    [m + 1, m + 1 + top / 2 + top / 4, if cfg.model.dim() == 3 { m + 1 + top / 2 } else { 0 }]
}

fn context(cfg: &ExperimentConfig, size: u32) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Experiment { id: cfg.id.clone(), size, source: Box::new(e) }
}

fn base_record(cfg: &ExperimentConfig, hash: &str, size: u32, sample: u32, h: &Hypersurface, model: &Model) -> ExperimentRecord {
    ExperimentRecord {
        experiment: cfg.id.clone(),
        size,
        sample_id: sample,
        k: h.k(),
        vol: h.volume(),
        diam: h.diameter(&model.metric),
        config_hash: hash.to_string(),
        ..Default::default()
    }
}

fn tally_cert(rec: &mut ExperimentRecord, cert: &PartitionCertificate, model: &Model, prefix: &str) {
    rec.tally(cert.assertions.iter().map(|a| (a.name.as_str(), a.pass)));
    let glued = cert.check(model).is_ok();
    let name = format!("{prefix}gluing");
    rec.tally([(name.as_str(), glued)]);
}

/// Runs one config. Records come back sorted by (experiment, size, sample).
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let model = generate(&cfg.model_spec()?)?;
    let hash = cfg.hash();
    let out = match cfg.experiment {
        ExperimentKind::DivergenceProfile => divergence(&model, cfg, &hash)?,
        kind => {
            let jobs: Vec<(u32, u32, Hypersurface)> = cfg
                .sizes
                .iter()
                .map(|&s| Ok(family_members(&model, cfg, s).map_err(context(cfg, s))?.into_iter().map(move |(i, h)| (s, i, h))))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let records = jobs
                .par_iter()
                .map(|(s, i, h)| {
                    let t = Instant::now();
                    let mut rec = base_record(cfg, &hash, *s, *i, h, &model);
                    measure(kind, &model, cfg, *s, h, &mut rec).map_err(context(cfg, *s))?;
                    rec.runtime_ms = cfg.timings.then(|| t.elapsed().as_millis());
                    Ok(rec)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut out = RunOutput { config_hash: hash, records, summary: Summary::default() }.finish();
            summarize(kind, cfg, &mut out)?;
            out
        }
    };
    Ok(out.finish())
}

fn measure(kind: ExperimentKind, model: &Model, cfg: &ExperimentConfig, size: u32, h: &Hypersurface, rec: &mut ExperimentRecord) -> Result<()> {
    match kind {
        ExperimentKind::IsoProfile => {
            let f = fill(model, h, cfg.method, None)?;
            rec.value = f.volume;
            rec.finite = f.volume.is_some();
            rec.fill_rad = f.radius;
            rec.c_cone = f.volume.map(|v| cone_constant(v, h, &model.metric));
            let exact = match (cfg.family, cfg.method) {
                (Family::Square, FillMethod::Oracle) => Some(2 * (size as u64).pow(2)),
                (Family::Cube, FillMethod::Oracle) => Some(6 * (size as u64).pow(3)),
                _ => None,
            };
            if let Some(e) = exact {
                rec.reference = Some(e);
                rec.tally([("closed_form", f.volume == Some(e))]);
            }
        }
        ExperimentKind::RadiusProfile => {
            let f = fill(model, h, FillMethod::Oracle, None)?;
            rec.value = f.volume;
            rec.finite = f.volume.is_some();
            rec.fill_rad = f.radius;
            if let Filling::Chain(c) = &f.filling {
                // only embedded fills can be walked; others are skipped, not failed
                if let Ok(d) = c.to_domain(model, h) {
                    let v = deepest_vertex(&d);
                    let steps = radius_growth_profile(&d, &model.metric, v);
                    rec.tally([("growth", growth_violations(&steps, h.k()).is_empty())]);
                }
            }
        }
        ExperimentKind::PartitionSweep => {
            let cert = round_partition_full(model, h, cfg.eps)?;
            rec.pieces = Some(cert.contours.len());
            rec.eta = cert.constants.get("eta").copied();
            rec.value = Some(cert.contour_volume() as u64);
            rec.finite = true;
            tally_cert(rec, &cert, model, "");
        }
        ExperimentKind::FoldedSweep => {
            let fs = folded_set(&h.map, &model.metric, cfg.eps, cfg.rho);
            rec.value = Some(fs.len() as u64);
            rec.finite = true;
            rec.tally([("folded.nonempty", !fs.is_empty())]);
            for &y in &fs.members {
                let (_, checks) = critical_radius(h, &model.metric, y, cfg.eps, cfg.rho)?;
                rec.tally(checks.iter().map(|a| (a.name.as_str(), a.pass)));
            }
            let removal = remove_folded(model, h, cfg.eps, cfg.rho)?;
            rec.sigma = removal.constants.get("sigma").copied();
            tally_cert(rec, &removal, model, "folded.");
            let tt = folded_unfolded_decomposition(model, h, cfg.eps, cfg.delta)?;
            rec.pieces = Some(tt.contours.len());
            tally_cert(rec, &tt, model, "thickthin.");
        }
        ExperimentKind::PipelineCompare => {
            let p = pipeline_fill(model, h, &PipelineParams::default())?;
            rec.value = p.result.volume;
            rec.finite = p.result.volume.is_some();
            rec.reference = p.oracle;
            rec.pieces = Some(p.terminal);
            rec.c_cone = p.ratio();
            tally_cert(rec, &p.certificate, model, "pipeline.");
        }
        ExperimentKind::DivergenceProfile => unreachable!("handled by divergence()"),
    }
    Ok(())
}

/// Interior vertex farthest (in the domain) from the boundary; lowest id on ties.
fn deepest_vertex(d: &FillingDomain) -> VertexId {
    let dist = d.map.domain.bfs_multi(&d.boundary, None);
    let mut best = (0u32, 0u32);
    for (v, &x) in dist.iter().enumerate() {
        if x != UNREACHABLE && x > best.1 {
            best = (v as u32, x);
        }
    }
    best.0
}

fn summarize(kind: ExperimentKind, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let id = cfg.id.clone();
    let pts: Vec<(f64, f64)> = out.per_size(&id).into_iter().filter_map(|(_, x, v)| v.filter(|&v| v > 0).map(|v| (x, v as f64))).collect();
    let s = &mut out.summary;
    match kind {
        ExperimentKind::IsoProfile => {
            if pts.len() >= 3 {
                s.fits.insert("fill_vs_vol_root".into(), fit_exponent(&pts)?);
            }
            let c = out.records.iter().filter_map(|r| r.c_cone).fold(0.0, f64::max);
            s.constants.insert("c_cone_max".into(), c);
        }
        ExperimentKind::RadiusProfile => {
            let rp: Vec<(f64, f64)> =
                out.records.iter().filter_map(|r| r.fill_rad.map(|f| (r.size as f64, f))).collect();
            if rp.len() >= 2 {
                let (b, a) = ols(&rp);
                let max_r = rp.iter().map(|p| p.1).fold(0.0, f64::max);
                let worst = rp.iter().map(|&(x, y)| (y - a - b * x).abs()).fold(0.0, f64::max);
                s.constants.insert("radius_intercept".into(), a);
                s.constants.insert("radius_slope".into(), b);
                s.checks.push(Assertion::le("radius.affine_residual", worst, 0.05 * max_r));
            }
        }
        ExperimentKind::PartitionSweep => {
            let eta = out.records.iter().filter_map(|r| r.eta).fold(0.0, f64::max);
            s.constants.insert("eta_max".into(), eta);
        }
        ExperimentKind::FoldedSweep => {
            let sigma = out.records.iter().filter_map(|r| r.sigma).fold(0.0, f64::max);
            s.constants.insert("sigma_max".into(), sigma);
        }
        ExperimentKind::PipelineCompare => {
            let ratios: Vec<f64> = out.records.iter().filter_map(|r| r.c_cone).collect();
            s.constants.insert("ratio_max".into(), ratios.iter().copied().fold(0.0, f64::max));
            for r in &mut out.records {
                let ok = matches!((r.value, r.reference), (Some(a), Some(o)) if a >= o) || r.reference.is_none();
                r.tally([("sandwich", ok)]);
            }
        }
        ExperimentKind::DivergenceProfile => {}
    }
    Ok(())
}

fn divergence_samples(model: &Model, cfg: &ExperimentConfig) -> Result<Vec<DivSample>> {
    match cfg.family {
        Family::Pair => {
            let top = *cfg.sizes.last().expect("validated") as i32;
            let m = cfg.margin as i32;
            pair_family(model, [m + 1 + top, m + 1 + top / 2, 0], &cfg.sizes, cfg.delta)
        }
        Family::NearLoop => near_family(model, near_center(cfg), &cfg.sizes, cfg.delta),
        f => Err(Error::Config(format!("family {f:?} has no divergence samples"))),
    }
}

fn div_records(cfg: &ExperimentConfig, hash: &str, id: &str, p: &DivergenceProfile, family: &[DivSample]) -> Vec<ExperimentRecord> {
    p.records
        .iter()
        .map(|r| {
            let s = &family[r.sample_id];
            let vol = match &s.target {
                DivTarget::Surface(h) => h.volume(),
                DivTarget::Pair { .. } => 2,
            };
            let mut rec = ExperimentRecord {
                experiment: id.to_string(),
                size: r.r,
                sample_id: r.sample_id as u32,
                k: r.k,
                vol,
                value: r.value,
                finite: r.finite,
                reference: r.baseline,
                runtime_ms: cfg.timings.then_some(r.runtime_ms),
                config_hash: hash.to_string(),
                ..Default::default()
            };
            let ok = matches!((r.value, r.baseline), (Some(v), Some(b)) if v >= b) || r.value.is_none() || r.baseline.is_none();
            rec.tally([("sandwich", ok)]);
            if r.k == 0 {
                rec.tally([("div0_at_least_2n", r.value.is_none_or(|v| v >= 2 * r.r as u64))]);
            }
            rec
        })
        .collect()
}

fn divergence(model: &Model, cfg: &ExperimentConfig, hash: &str) -> Result<RunOutput> {
    let family = divergence_samples(model, cfg)?;
    let general = div_profile(model, &family, None)?;
    let mut records = div_records(cfg, hash, &cfg.id, &general, &family);
    let mut summary = Summary::default();
    if let Some(f) = general.fit {
        summary.fits.insert("divergence".into(), f);
    }
    summary.constants.insert("skipped".into(), general.skipped.len() as f64);
    if let Some(eta) = cfg.eta {
        let restricted = div_profile(model, &family, Some(RoundFilter { eta, a: cfg.a }))?;
        let rid = format!("{}/restricted", cfg.id);
        records.extend(div_records(cfg, hash, &rid, &restricted, &family));
        if let Some(f) = restricted.fit {
            summary.fits.insert("divergence_restricted".into(), f);
        }
        for (g, r) in general.points.iter().zip(&restricted.points) {
            if let (Some(a), Some(b)) = (g.value, r.value) {
                summary.checks.push(Assertion::le(format!("restricted_le_general.r{}", g.r), b as f64, a as f64));
            }
        }
    }
    Ok(RunOutput { config_hash: hash.to_string(), records, summary })
}

/// Writes the CSV and, when asked for, the SVG of a run.
pub fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput) -> Result<()> {
    if let Some(path) = &cfg.csv {
        write_csv_file(path, &out.records)?;
    }
    if let Some(path) = &cfg.svg {
        let mut ids: Vec<&str> = out.records.iter().map(|r| r.experiment.as_str()).collect();
        ids.dedup();
        let series: Vec<Series> = ids
            .iter()
            .map(|id| Series {
                label: id.to_string(),
                points: out.per_size(id).into_iter().map(|(_, x, v)| (x, v.map(|v| v as f64))).collect(),
            })
            .collect();
        let axes = Axes { title: cfg.id.clone(), x: "size".into(), y: "value".into() };
        let svg = emit_plot(&series, &axes)?;
        std::fs::write(path, svg).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelKind;

    #[test]
    fn iso_profile_on_squares() {
        let cfg = ExperimentConfig::new(ExperimentKind::IsoProfile, ModelKind::Grid2, Family::Square, vec![4, 8, 16, 32]);
        let out = run(&cfg).unwrap();
        assert!(out.ok(), "{:?}", out.summary);
        assert_eq!(out.records.len(), 4);
        assert!((out.summary.fits["fill_vs_vol_root"].slope - 2.0).abs() < 0.05);
        let again = run(&cfg).unwrap();
        assert_eq!(out.records, again.records);
    }

    #[test]
    fn pair_divergence_is_linear() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::DivergenceProfile, ModelKind::Grid2, Family::Pair, vec![8, 16, 32, 64]);
        cfg.delta = 0.25;
        let out = run(&cfg).unwrap();
        assert!(out.ok());
        assert!((out.summary.fits["divergence"].slope - 1.0).abs() < 0.1);
    }

    #[test]
    fn restricted_loops_stay_below() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::DivergenceProfile, ModelKind::Grid2, Family::NearLoop, vec![4, 8, 16]);
        cfg.eta = Some(1.0);
        let out = run(&cfg).unwrap();
        assert!(out.ok(), "{:?}", out.summary.checks);
        assert!(out.summary.checks.iter().any(|a| a.name.starts_with("restricted_le_general")));
    }
}
