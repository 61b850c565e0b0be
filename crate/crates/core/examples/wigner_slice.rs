//! Wigner function of psi(1,1): a slice, its negative region, and the
//! reductions over the whole phase space.

use ncplane::phasespace::{Coord, PhasePoint};
use ncplane::quantum::Basis;
use ncplane::wigner::{marginal, negativity_witness, normalization, overlap, slice, QuadratureSettings, SliceSpec, WignerEvaluator};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.5);
    let w = WignerEvaluator::eigenstate(1, 1, &p, QuadratureSettings::default())?;

    let s = slice(
        &w,
        SliceSpec {
            vary: (Coord::X, Coord::Px),
            fixed: PhasePoint::ORIGIN,
            range1: (-3.0, 3.0),
            range2: (-3.0, 3.0),
            n1: 13,
            n2: 13,
        },
    )?;
    println!("x-px slice: min {:.4} max {:.4}", s.min(), s.max());

    let neg = negativity_witness(&w)?;
    println!("most negative lattice value {:.4e} at {}", neg.min, neg.point);
    println!("normalization {:.8}", normalization(&w)?);
    println!("purity        {:.8}", overlap(&w, &w)?);
    let m = marginal(&w, Basis::XPy)?;
    println!("(x, py) marginal total {:.8}", m.total());
    Ok(())
}
