//! Hermite eigenfunctions on a momentum grid and their operator residuals.

use ncplane::quantum::{apply_angular_momentum, apply_hamiltonian, eigen_residual, eigenfunction, levels, oscillator_grid, Stencil};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.3);
    let grid = oscillator_grid(&p, 8.0, 128)?;
    let st = Stencil::new(8)?;
    println!("n  2j   E          H residual  J residual");
    for e in levels(3, &p)? {
        let psi = eigenfunction(e.n, e.two_j, &p, grid)?;
        let rh = eigen_residual(&apply_hamiltonian(&psi, &p, st)?, &psi, e.energy, st)?;
        let rj = eigen_residual(&apply_angular_momentum(&psi, &p, st)?, &psi, p.hbar * e.two_j as f64, st)?;
        println!("{}  {:+}   {:.6}   {rh:.2e}    {rj:.2e}", e.n, e.two_j, e.energy);
    }
    Ok(())
}
