//! div0 of point pairs around a blocked ball, and div1 of loops around it.

use fillab::divergence::{div_profile, divk, near_family, pair_family, DivergenceQuery};
use fillab::models::square_loop;
use fillab::{generate, ModelKind, ModelSpec};

fn main() -> fillab::Result<()> {
    let m = generate(&ModelSpec::new(ModelKind::Grid2, 140))?;
    let center = [70, 70, 0];
    let pairs = pair_family(&m, center, &[8, 16, 32, 64], 0.5)?;
    let p = div_profile(&m, &pairs, None)?;
    for pt in &p.points {
        println!("div0 r {:>3}: {:?} (>= 2r: {})", pt.r, pt.value, pt.value.is_some_and(|v| v >= 2 * pt.r as u64));
    }
    println!("slope {:.3}", p.fit.as_ref().map_or(f64::NAN, |f| f.slope));

    let loops = near_family(&m, [10, 70, 0], &[2, 4, 8], 0.5)?;
    let q = div_profile(&m, &loops, None)?;
    println!("div1 points {:?}", q.points.iter().map(|p| (p.r, p.value)).collect::<Vec<_>>());

    // a loop that winds around the ball cannot avoid it
    let c = m.vertex_at(center)?;
    let h = square_loop(&m, m.vertex_at([60, 60, 0])?, 20)?;
    let q = DivergenceQuery::new(&m, h, c, 10, 0.5)?;
    println!("winding loop: {:?}", divk(&m, &q)?.value);
    Ok(())
}
