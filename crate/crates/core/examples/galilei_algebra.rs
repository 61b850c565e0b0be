//! Brackets of the Galilei generators at random phase-space points.

use ncplane::phasespace::{poisson_bracket, sample_points, verify_algebra, Field, PhasePoint};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.7).with_m(2.0);

    let z = PhasePoint::new(0.3, -1.0, 0.5, 2.0);
    println!("{{x, y}}   = {}", poisson_bracket(&Field::x(), &Field::y(), z, 0.0, &p)?);
    println!("{{x, px}}  = {}", poisson_bracket(&Field::x(), &Field::px(), z, 0.0, &p)?);
    println!("{{px, py}} = {}", poisson_bracket(&Field::px(), &Field::py(), z, 0.0, &p)?);

    let report = verify_algebra(&p, 0.0, &sample_points(100, 42, 10.0), 1e-9)?;
    print!("\n{}", report.to_table());
    println!("all relations hold: {}", report.all_pass());
    Ok(())
}
