//! Partition-then-fill against the direct oracle on cube spheres.

use fillab::decomposition::{pipeline_fill, PipelineParams};
use fillab::models::boundary_sphere;
use fillab::{generate, ModelKind, ModelSpec};

fn main() -> fillab::Result<()> {
    let m = generate(&ModelSpec::new(ModelKind::Grid3, 12))?;
    for s in [2, 4, 6, 8] {
        let h = boundary_sphere(&m, m.vertex_at([1, 1, 1])?, s)?;
        let p = pipeline_fill(&m, &h, &PipelineParams::default())?;
        println!(
            "s {s}: assembled {:?}, oracle {:?}, ratio {:.3}, {} terminal pieces",
            p.result.volume,
            p.oracle,
            p.ratio().unwrap_or(f64::NAN),
            p.terminal
        );
    }
    Ok(())
}
