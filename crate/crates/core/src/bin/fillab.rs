use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fillab::decomposition::{
    critical_radius, folded_unfolded_decomposition, pipeline_fill, remove_folded, round_partition_full,
    round_partition_step, unfolded_to_round, PartitionCertificate, PipelineParams,
};
use fillab::divergence::{div_profile, near_family, pair_family, RoundFilter};
use fillab::filling::{fill, FillMethod};
use fillab::harness::{self, write_csv_file, ExperimentConfig};
use fillab::hypersurface::folded_set;
use fillab::models::{boundary_sphere, dumbbell_sphere, perturbed_sphere, square_loop, BulbShape, DumbbellParams};
use fillab::{generate, Error, Hypersurface, Model, ModelKind, ModelSpec, Result};

#[derive(Parser)]
#[command(name = "fillab", version, about = "filling volumes, partitions and divergence on grid models")]
struct Cli {
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// seed override for generators and experiments
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a model complex, and optionally a test hypersurface in it.
    Generate(GenerateArgs),
    /// Fill a hypersurface and print a JSON report.
    Fill(FillArgs),
    /// Partition a hypersurface and write a certificate.
    Partition(PartitionArgs),
    /// Folded set and critical radii of a hypersurface.
    Folded(FoldedArgs),
    /// Divergence profile of a sampled family.
    Divergence(DivergenceArgs),
    /// Run an experiment config.
    Experiment(ExperimentArgs),
    /// Re-check a certificate against its complex.
    CheckCert(CheckArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    model: ModelKind,
    #[arg(long, default_value_t = 8)]
    size: u32,
    #[arg(long, default_value_t = 1)]
    margin: u32,
    /// per-axis sides, comma separated
    #[arg(long, value_delimiter = ',')]
    extent: Option<Vec<u32>>,
    /// removed ball as cx,cy[,cz],r
    #[arg(long)]
    removal: Option<String>,
    #[arg(long)]
    out: PathBuf,
    /// also write a hypersurface of this kind
    #[arg(long, requires = "hsf")]
    surface: Option<SurfaceKind>,
    #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
    corner: Vec<i32>,
    /// side length, or neck length for dumbbells
    #[arg(long, default_value_t = 4)]
    side: u32,
    #[arg(long)]
    hsf: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceKind {
    Square,
    Cube,
    Perturbed,
    Dumbbell,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long)]
    surface: PathBuf,
}

#[derive(Args)]
struct FillArgs {
    #[command(flatten)]
    io: Inputs,
    #[arg(long, default_value = "oracle")]
    method: FillMethod,
    /// cone apex vertex
    #[arg(long)]
    apex: Option<u32>,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operation {
    Round,
    Folded,
    Thickthin,
    Thickround,
    Pipeline,
}

#[derive(Args)]
struct PartitionArgs {
    op: Operation,
    #[command(flatten)]
    io: Inputs,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// scale for `folded`
    #[arg(long, default_value_t = 10.0)]
    rho: f64,
    /// a single round step instead of the full iteration
    #[arg(long)]
    step: bool,
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct FoldedArgs {
    #[command(flatten)]
    io: Inputs,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 10.0)]
    rho: f64,
}

#[derive(Args)]
struct DivergenceArgs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// keep only η-round samples
    #[arg(long)]
    round_eta: Option<f64>,
    /// volume cap constant for --round-eta
    #[arg(long, default_value_t = 3.0)]
    a: f64,
    /// `pair:8,16,32` or `near:4,8,16`
    #[arg(long)]
    family: String,
    /// grid point the family is centred on
    #[arg(long, value_delimiter = ',')]
    center: Vec<i32>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    config: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long)]
    cert: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fillab: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fillab: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means a hard assertion failed.
fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Generate(a) => generate_cmd(cli, a),
        Cmd::Fill(a) => fill_cmd(cli, a),
        Cmd::Partition(a) => partition_cmd(cli, a),
        Cmd::Folded(a) => folded_cmd(cli, a),
        Cmd::Divergence(a) => divergence_cmd(cli, a),
        Cmd::Experiment(a) => experiment_cmd(cli, a),
        Cmd::CheckCert(a) => check_cmd(cli, a),
    }
}

fn load_model(path: &Path, verbose: bool) -> Result<Model> {
    let t = Instant::now();
    let m = Model::read_scx(path)?;
    if std::env::var_os("FILLAB_CACHE").is_some() {
        m.metric.precompute_all_pairs()?;
    }
    if verbose {
        eprintln!("loaded {} ({} vertices, {} chambers) in {:?}", path.display(), m.complex.num_vertices(), m.complex.num_chambers(), t.elapsed());
    }
    Ok(m)
}

fn load(io: &Inputs, verbose: bool) -> Result<(Model, Hypersurface)> {
    let m = load_model(&io.complex, verbose)?;
    let h = Hypersurface::read_hsf(&io.surface, &m.complex)?;
    Ok((m, h))
}

fn print_json(v: &serde_json::Value) {
    print_text(&serde_json::to_string_pretty(v).expect("json values serialize"));
}

// a closed pipe (`| head`) is not worth a panic
fn print_text(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn generate_cmd(cli: &Cli, a: &GenerateArgs) -> Result<bool> {
    let mut spec = ModelSpec::new(a.model, a.size).margin(a.margin);
    if let Some(e) = &a.extent {
        spec = spec.extent(e.clone());
    }
    if let Some(r) = &a.removal {
        let r = fillab::models::parse_removal(r)?;
        spec = spec.removal(r.center, r.radius);
    }
    let m = generate(&spec)?;
    m.write_scx(&a.out)?;
    if cli.verbose {
        eprintln!("wrote {} ({} chambers)", a.out.display(), m.complex.num_chambers());
    }
    if let (Some(kind), Some(path)) = (a.surface, &a.hsf) {
        let mut p = [0i32; 3];
        for (i, &c) in a.corner.iter().take(3).enumerate() {
            p[i] = c;
        }
        let h = match kind {
            SurfaceKind::Square => square_loop(&m, m.vertex_at(p)?, a.side)?,
            SurfaceKind::Cube => boundary_sphere(&m, m.vertex_at(p)?, a.side)?,
            SurfaceKind::Perturbed => perturbed_sphere(&m, m.vertex_at(p)?, a.side, cli.seed.unwrap_or(0))?.0,
            SurfaceKind::Dumbbell => dumbbell_sphere(&m, &DumbbellParams::new(p, BulbShape::Box([2, 2, 2]), a.side))?,
        };
        h.write_hsf(path)?;
        if cli.verbose {
            eprintln!("wrote {} (volume {})", path.display(), h.volume());
        }
    }
    Ok(true)
}

fn fill_cmd(cli: &Cli, a: &FillArgs) -> Result<bool> {
    let (m, h) = load(&a.io, cli.verbose)?;
    let t = Instant::now();
    let f = fill(&m, &h, a.method, a.apex)?;
    let report = serde_json::to_string_pretty(&f.report(t.elapsed().as_millis()))?;
    match &a.out {
        Some(p) => std::fs::write(p, report).map_err(|e| Error::Io { path: p.clone(), source: e })?,
        None => print_text(&report),
    }
    Ok(true)
}

fn certificate_summary(cert: &PartitionCertificate) -> serde_json::Value {
    json!({
        "operation": cert.operation,
        "contours": cert.contours.len(),
        "contourVolume": cert.contour_volume(),
        "remainder": cert.remainder.len(),
        "remainderVolume": cert.remainder_volume(),
        "caps": cert.caps.len(),
        "constants": cert.constants,
        "flags": cert.flags,
        "failed": cert.failures(),
    })
}

fn partition_cmd(cli: &Cli, a: &PartitionArgs) -> Result<bool> {
    let (m, h) = load(&a.io, cli.verbose)?;
    let t = Instant::now();
    let (cert, extra) = match a.op {
        Operation::Round if a.step => (round_partition_step(&m, &h, a.eps)?, None),
        Operation::Round => (round_partition_full(&m, &h, a.eps)?, None),
        Operation::Folded => (remove_folded(&m, &h, a.eps, a.rho)?, None),
        Operation::Thickthin => (folded_unfolded_decomposition(&m, &h, a.eps, a.delta)?, None),
        Operation::Thickround => (unfolded_to_round(&m, &h, a.eps, a.delta)?, None),
        Operation::Pipeline => {
            let params = PipelineParams { eps_round: a.eps, delta: a.delta, ..PipelineParams::default() };
            let p = pipeline_fill(&m, &h, &params)?;
            let report = json!({ "fill": p.result.report(t.elapsed().as_millis()), "oracle": p.oracle, "ratio": p.ratio() });
            (p.certificate, Some(report))
        }
    };
    let glued = cert.check(&m);
    if let Some(path) = &a.cert {
        cert.write(path)?;
    }
    let mut out = certificate_summary(&cert);
    out["gluing"] = json!(glued.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string()));
    out["runtime_ms"] = json!(t.elapsed().as_millis());
    if let Some(x) = extra {
        out["pipeline"] = x;
    }
    print_json(&out);
    Ok(glued.is_ok() && cert.all_passed())
}

fn folded_cmd(cli: &Cli, a: &FoldedArgs) -> Result<bool> {
    let (m, h) = load(&a.io, cli.verbose)?;
    let fs = folded_set(&h.map, &m.metric, a.eps, a.rho);
    let mut radii = Vec::new();
    let mut ok = true;
    for &y in &fs.members {
        let (r, checks) = critical_radius(&h, &m.metric, y, a.eps, a.rho)?;
        ok &= checks.iter().all(|c| c.pass);
        radii.push(json!({ "radii": r, "checks": checks }));
    }
    print_json(&json!({ "eps": a.eps, "rho": a.rho, "folded": fs.members, "critical": radii }));
    Ok(ok)
}

fn divergence_cmd(cli: &Cli, a: &DivergenceArgs) -> Result<bool> {
    let m = load_model(&a.complex, cli.verbose)?;
    let (kind, sizes) = a.family.split_once(':').ok_or_else(|| Error::Config(format!("bad family {:?}", a.family)))?;
    let sizes: Vec<u32> = sizes
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| Error::Config(format!("bad size {s:?}"))))
        .collect::<Result<_>>()?;
    let mut center = [0i32; 3];
    for (i, &c) in a.center.iter().take(3).enumerate() {
        center[i] = c;
    }
    let family = match kind {
        "pair" => pair_family(&m, center, &sizes, a.delta)?,
        "near" => near_family(&m, center, &sizes, a.delta)?,
        _ => return Err(Error::Config(format!("unknown divergence family {kind:?}"))),
    };
    if let Some(s) = family.iter().find(|s| s.k() != a.k) {
        return Err(Error::Config(format!("family has k = {}, not {}", s.k(), a.k)));
    }
    let round = a.round_eta.map(|eta| RoundFilter { eta, a: a.a });
    let p = div_profile(&m, &family, round)?;
    if let Some(path) = &a.csv {
        write_csv_file(path, &p.records)?;
    }
    let bad = p.sandwich_violations();
    print_json(&json!({ "points": p.points, "fit": p.fit, "skipped": p.skipped, "sandwichViolations": bad }));
    Ok(bad.is_empty())
}

fn experiment_cmd(cli: &Cli, a: &ExperimentArgs) -> Result<bool> {
    let mut cfg = ExperimentConfig::read(&a.config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if a.csv.is_some() {
        cfg.csv = a.csv.clone();
    }
    if a.svg.is_some() {
        cfg.svg = a.svg.clone();
    }
    let t = Instant::now();
    let out = harness::run(&cfg)?;
    harness::write_outputs(&cfg, &out)?;
    if cli.verbose {
        eprintln!("{} records in {:?}", out.records.len(), t.elapsed());
    }
    print_json(&json!({ "id": cfg.id, "configHash": out.config_hash, "summary": out.summary }));
    Ok(out.ok())
}

fn check_cmd(cli: &Cli, a: &CheckArgs) -> Result<bool> {
    let m = load_model(&a.complex, cli.verbose)?;
    let cert = PartitionCertificate::read(&a.cert, &m)?;
    let report = cert.check(&m);
    let failed = cert.failures();
    let ok = report.is_ok() && failed.is_empty();
    let gluing = match &report {
        Ok(r) => json!(r),
        Err(e) => json!(e.to_string()),
    };
    print_json(&json!({ "ok": ok, "gluing": gluing, "failedAssertions": failed }));
    Ok(ok)
}
