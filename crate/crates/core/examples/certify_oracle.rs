//! Brute-force check of the oracle on a small sphere: exhaustive search and
//! branch-and-bound over every chain in the bounding box.

use fillab::filling::{enumerate_fills, oracle_fill, oriented_cycles, SearchMode};
use fillab::models::boundary_sphere;
use fillab::{generate, ModelKind, ModelSpec};

fn main() -> fillab::Result<()> {
    let m = generate(&ModelSpec::new(ModelKind::Grid3, 5))?;
    let h = boundary_sphere(&m, m.vertex_at([1, 1, 1])?, 2)?;
    let oracle = oracle_fill(&m, &h, None)?;
    println!("oracle volume {:?}, certified {}", oracle.volume, oracle.optimality_certificate);

    let z = &oriented_cycles(&h)?[0];
    for mode in [SearchMode::Exhaustive, SearchMode::BranchAndBound] {
        let e = enumerate_fills(&m, z, None, 1, mode)?;
        println!("{mode:?}: window {} chambers, {} solutions, min {:?}, {} nodes", e.window, e.solutions, e.min_mass, e.nodes);
    }
    Ok(())
}
