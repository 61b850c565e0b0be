//! Moving a state between the (px, py), (x, py) and (y, px) pictures.

use ncplane::quantum::{eigenfunction, oscillator_grid, transform, transform_conjugate, Basis};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.5);
    let psi = eigenfunction(1, 1, &p, oscillator_grid(&p, 8.0, 96)?)?;
    let xpy = transform_conjugate(&psi, Basis::XPy, &p)?;
    let ypx = transform_conjugate(&xpy, Basis::YPx, &p)?;
    let back = transform(&transform_conjugate(&ypx, Basis::Momentum, &p)?, Basis::Momentum, psi.grid, &p)?;
    println!("norms: p {:.12} xpy {:.12} ypx {:.12}", psi.norm(), xpy.norm(), ypx.norm());
    println!("roundtrip p -> xpy -> ypx -> p, max error {:.2e}", back.max_abs_diff(&psi)?);
    Ok(())
}
