//! Folded set of dumbbells with growing necks, and the thick/thin split.

use fillab::decomposition::{critical_radius, folded_unfolded_decomposition};
use fillab::hypersurface::folded_set;
use fillab::models::{dumbbell_sphere, BulbShape, DumbbellParams};
use fillab::{generate, ModelKind, ModelSpec};

fn main() -> fillab::Result<()> {
    let (eps, rho) = (0.5, 10.0);
    for neck in [10, 20, 40] {
        let p = DumbbellParams::new([1, 1, 1], BulbShape::Box([2, 2, 2]), neck);
        let m = generate(&ModelSpec::new(ModelKind::Grid3, 0).margin(1).extent(p.extent(1)))?;
        let h = dumbbell_sphere(&m, &p)?;
        let fs = folded_set(&h.map, &m.metric, eps, rho);
        print!("neck {neck:>2}: volume {:>4}, folded {:>3}", h.volume(), fs.len());
        if let Some(&y) = fs.members.first() {
            let (r, _) = critical_radius(&h, &m.metric, y, eps, rho)?;
            print!(", first {r:?}");
        }
        let cert = folded_unfolded_decomposition(&m, &h, 0.1, 0.25)?;
        println!(", thickthin sigma {:.3}", cert.constants.get("sigma").copied().unwrap_or(0.0));
    }
    Ok(())
}
