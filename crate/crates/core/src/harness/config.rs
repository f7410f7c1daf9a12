//! Flat `key = value` experiment configs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filling::FillMethod;
use crate::models::{parse_removal, ModelKind, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    IsoProfile,
    RadiusProfile,
    PartitionSweep,
    FoldedSweep,
    DivergenceProfile,
    PipelineCompare,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::IsoProfile => "iso-profile",
            ExperimentKind::RadiusProfile => "radius-profile",
            ExperimentKind::PartitionSweep => "partition-sweep",
            ExperimentKind::FoldedSweep => "folded-sweep",
            ExperimentKind::DivergenceProfile => "divergence-profile",
            ExperimentKind::PipelineCompare => "pipeline-compare",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "iso-profile" => ExperimentKind::IsoProfile,
            "radius-profile" => ExperimentKind::RadiusProfile,
            "partition-sweep" => ExperimentKind::PartitionSweep,
            "folded-sweep" => ExperimentKind::FoldedSweep,
            "divergence-profile" => ExperimentKind::DivergenceProfile,
            "pipeline-compare" => ExperimentKind::PipelineCompare,
            _ => return Err(Error::Config(format!("unknown experiment {s:?}"))),
        })
    }
}

/// Hypersurface families the harness knows how to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Square loops of side `s` (grid2).
    Square,
    /// Boundary spheres of the `s`-cube (grid3).
    Cube,
    /// Cube spheres with seeded bumps and dents (grid3).
    Perturbed,
    /// Box-bulb dumbbells with neck length `s` (grid3).
    Dumbbell,
    /// Tetrahedron-bulb dumbbells with neck length `s` (grid3).
    TetraDumbbell,
    /// Point pairs `c ∓ (s, 0)` (grid2, divergence only).
    Pair,
    /// Hypersurfaces at distance `s` from a center: squares and long rectangles in grid2, cubes in grid3 (divergence only).
    NearLoop,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "square" => Family::Square,
            "cube" => Family::Cube,
            "perturbed" => Family::Perturbed,
            "dumbbell" => Family::Dumbbell,
            "tetra-dumbbell" => Family::TetraDumbbell,
            "pair" => Family::Pair,
            "near-loop" => Family::NearLoop,
            _ => return Err(Error::Config(format!("unknown family {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub experiment: ExperimentKind,
    pub model: ModelKind,
    /// Patch size; picked from the family when absent.
    pub model_size: Option<u32>,
    pub margin: u32,
    pub removal: Option<String>,
    pub family: Family,
    pub sizes: Vec<u32>,
    pub samples: u32,
    pub seed: u64,
    pub method: FillMethod,
    pub eps: f64,
    pub delta: f64,
    pub eta: Option<f64>,
    /// Volume cap constant for round-restricted divergence, `Vol <= 2A r^k`.
    pub a: f64,
    pub rho: f64,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Write measured runtimes into the CSV (breaks byte-for-byte reruns).
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, model: ModelKind, family: Family, sizes: Vec<u32>) -> Self {
        Self {
            id: experiment.to_string(),
            experiment,
            model,
            model_size: None,
            margin: 1,
            removal: None,
            family,
            sizes,
            samples: 1,
            seed: 0,
            method: FillMethod::Oracle,
            eps: 0.5,
            delta: 0.25,
            eta: None,
            a: 3.0,
            rho: 10.0,
            csv: None,
            svg: None,
            timings: false,
        }
    }

    /// Parses a flat config. Nested tables are rejected.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(format!("{origin}: {e}")))?;
        let get = |k: &str| table.get(k);
        let bad = |k: &str, want: &str| Error::Config(format!("{origin}: {k} must be {want}"));
        let string = |k: &str| -> Result<Option<String>> {
            get(k).map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad(k, "a string"))).transpose()
        };
        let float = |k: &str| -> Result<Option<f64>> {
            get(k)
                .map(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).ok_or_else(|| bad(k, "a number")))
                .transpose()
        };
        let int = |k: &str| -> Result<Option<i64>> {
            get(k).map(|v| v.as_integer().filter(|&i| i >= 0).ok_or_else(|| bad(k, "a non-negative integer"))).transpose()
        };
        for (k, v) in &table {
            if v.is_table() {
                return Err(Error::Config(format!("{origin}: nested table {k:?}; configs are flat")));
            }
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("{origin}: unknown key {k:?}")));
            }
        }
        let req = |k: &str| string(k)?.ok_or_else(|| Error::Config(format!("{origin}: missing {k}")));
        let experiment: ExperimentKind = req("experiment")?.parse()?;
        let model: ModelKind = req("model")?.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        let family: Family = req("family")?.parse()?;
        let sizes = match get("sizes") {
            Some(v) => v
                .as_array()
                .ok_or_else(|| bad("sizes", "an array"))?
                .iter()
                .map(|x| x.as_integer().filter(|&i| i > 0).map(|i| i as u32).ok_or_else(|| bad("sizes", "positive integers")))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let mut c = Self::new(experiment, model, family, sizes);
        if let Some(id) = string("id")? {
            c.id = id;
        }
        c.model_size = int("model_size")?.map(|i| i as u32);
        if let Some(m) = int("margin")? {
            c.margin = m as u32;
        }
        c.removal = string("removal")?;
        if let Some(n) = int("samples")? {
            c.samples = n as u32;
        }
        if let Some(s) = int("seed")? {
            c.seed = s as u64;
        }
        if let Some(m) = string("method")? {
            c.method = m.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        }
        for (k, slot) in [("eps", &mut c.eps), ("delta", &mut c.delta), ("a", &mut c.a), ("rho", &mut c.rho)] {
            if let Some(x) = float(k)? {
                *slot = x;
            }
        }
        c.eta = float("eta")?;
        c.csv = string("csv")?.map(PathBuf::from);
        c.svg = string("svg")?.map(PathBuf::from);
        if let Some(v) = get("timings") {
            c.timings = v.as_bool().ok_or_else(|| bad("timings", "true or false"))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("empty size list".into()));
        }
        if self.sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("sizes must be strictly increasing".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if let Some(r) = &self.removal {
            parse_removal(r).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Model spec, with the patch size taken from the family when not given.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        let top = *self.sizes.last().expect("validated");
        let m = self.margin;
        let mut spec = ModelSpec::new(self.model, self.model_size.unwrap_or(0)).margin(m);
        if let Some(r) = &self.removal {
            let r = parse_removal(r)?;
            spec = spec.removal(r.center, r.radius);
        }
        if self.model_size.is_some() {
            return Ok(spec);
        }
        spec.extent = Some(match self.family {
            Family::Square | Family::Cube => vec![top + 2 * m; self.model.dim()],
            Family::Perturbed => vec![top + 2 * m + 2; 3],
            Family::Dumbbell | Family::TetraDumbbell => super::run::dumbbell(self.family, top, m).extent(m),
            Family::Pair => vec![2 * top + 2 * m + 2, top + 2 * m + 2],
            // center, a gap of s, then a 4s-wide rectangle
            Family::NearLoop if self.model.dim() == 3 => vec![2 * top + 2 * m + 2, 2 * top + 2 * m + 2, 2 * top + 2 * m + 2],
            Family::NearLoop => vec![6 * top + 2 * m + 2, 2 * top + 2 * m + 2],
        });
        spec.size = spec.extent.as_ref().unwrap().iter().copied().max().unwrap_or(0);
        Ok(spec)
    }

    /// Stable hash of the canonical JSON form, carried by every record. Output paths are left out.
    pub fn hash(&self) -> String {
        let bare = Self { csv: None, svg: None, ..self.clone() };
        let json = serde_json::to_string(&bare).expect("config serializes");
        // FNV-1a, fixed across platforms and toolchains
        let h = json.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
        format!("{h:016x}")
    }
}

const KEYS: &[&str] = &[
    "id", "experiment", "model", "model_size", "margin", "removal", "family", "sizes", "samples", "seed", "method", "eps",
    "delta", "eta", "a", "rho", "csv", "svg", "timings",
];
