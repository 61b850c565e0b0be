//! Oscillator levels: theta lifts the (n+1)-fold degeneracy.

use ncplane::quantum::{effective_frequency, levels};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    for theta in [0.0, 1.0] {
        let p = NCParams::unit(theta);
        println!("theta = {theta}, effective frequency {:.6}", effective_frequency(&p)?);
        for e in levels(3, &p)? {
            println!("  n {} 2j {:+} E {:.6}", e.n, e.two_j, e.energy);
        }
    }
    Ok(())
}
