//! An isoperimetric sweep through the harness, written as CSV and SVG.

use fillab::harness::{self, ExperimentConfig};

fn main() -> fillab::Result<()> {
    let dir = std::env::temp_dir();
    let text = format!(
        "id = \"cubes\"\nexperiment = \"iso-profile\"\nmodel = \"grid3\"\nfamily = \"cube\"\nsizes = [2, 3, 4, 6]\ncsv = {:?}\nsvg = {:?}\n",
        dir.join("cubes.csv"),
        dir.join("cubes.svg")
    );
    let cfg = ExperimentConfig::parse(&text, "inline")?;
    let out = harness::run(&cfg)?;
    harness::write_outputs(&cfg, &out)?;
    for (name, f) in &out.summary.fits {
        println!("{name}: slope {:.3}", f.slope);
    }
    println!("{} passed, {} failed; wrote {}", out.summary.passed, out.summary.failed, dir.join("cubes.csv").display());
    Ok(())
}
