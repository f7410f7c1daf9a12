//! Round partition of a bumpy sphere, then the certificate checked and written.

use fillab::decomposition::round_partition_full;
use fillab::models::perturbed_sphere;
use fillab::{generate, ModelKind, ModelSpec};

fn main() -> fillab::Result<()> {
    let m = generate(&ModelSpec::new(ModelKind::Grid3, 14).margin(2))?;
    let (h, bumps) = perturbed_sphere(&m, m.vertex_at([3, 3, 3])?, 8, 7)?;
    println!("sphere: volume {}, {bumps} bumps", h.volume());

    let cert = round_partition_full(&m, &h, 0.5)?;
    let glue = cert.check(&m)?;
    println!("{} contours ({} chambers), remainder {} chambers", cert.contours.len(), cert.contour_volume(), cert.remainder_volume());
    println!("constants {:?}", cert.constants);
    println!("flags {:?}, glued {} pieces over {} chambers", cert.flags, glue.pieces, glue.source_chambers);
    for a in &cert.assertions {
        println!("  {:<28} {:>10.3} vs {:>10.3}  {}", a.name, a.measured, a.bound, if a.pass { "ok" } else { "FAIL" });
    }

    let path = std::env::temp_dir().join("round.cert");
    cert.write(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
