//! Cone, heuristic and oracle fills of square loops and cube spheres.
//!
//! cargo run --example fill_methods

use fillab::filling::{fill, FillMethod};
use fillab::models::{boundary_sphere, square_loop};
use fillab::{generate, ModelKind, ModelSpec};

fn main() -> fillab::Result<()> {
    let g2 = generate(&ModelSpec::new(ModelKind::Grid2, 20))?;
    let g3 = generate(&ModelSpec::new(ModelKind::Grid3, 8))?;
    println!("{:<8} {:>4} {:>6} {:>10} {:>10} {:>8}", "shape", "s", "vol", "cone", "heuristic", "oracle");
    for s in [2, 4, 8, 16] {
        let h = square_loop(&g2, g2.vertex_at([1, 1, 0])?, s)?;
        row("square", s, &g2, &h)?;
    }
    for s in [2, 3, 4, 6] {
        let h = boundary_sphere(&g3, g3.vertex_at([1, 1, 1])?, s)?;
        row("cube", s, &g3, &h)?;
    }
    Ok(())
}

fn row(shape: &str, s: u32, m: &fillab::Model, h: &fillab::Hypersurface) -> fillab::Result<()> {
    let v = |method| fill(m, h, method, None).map(|f| f.volume.unwrap_or(0));
    println!(
        "{shape:<8} {s:>4} {:>6} {:>10} {:>10} {:>8}",
        h.volume(),
        v(FillMethod::Cone)?,
        v(FillMethod::Heuristic)?,
        v(FillMethod::Oracle)?
    );
    Ok(())
}
