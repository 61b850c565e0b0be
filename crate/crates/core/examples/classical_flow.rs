//! RK4 along the deformed Hamilton equations, with the Noether charges.

use ncplane::classical::{free_particle_solution, hamiltonian_flow, noether_charges, Charges};
use ncplane::phasespace::{free_hamiltonian, PhasePoint};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.5).with_m(1.5);
    let z0 = PhasePoint::new(0.0, 0.0, 1.0, 2.0);
    let traj = hamiltonian_flow(&free_hamiltonian(&p), z0, 0.0, 5.0, 1e-3, &p)?;
    let (t, z) = traj.last().unwrap();
    println!("RK4 at t = {t}: {z}");
    println!("exact      : {}", free_particle_solution(z0, t, &p));

    let drift = noether_charges(&traj, &p).charge_drift().unwrap();
    for (name, d) in Charges::NAMES.iter().zip(drift) {
        println!("drift of {name:<3} {d:.2e}");
    }

    // trajectory files carry the charges as extra columns
    let mut csv = Vec::new();
    noether_charges(&traj, &p).write_csv(&mut csv)?;
    let text = String::from_utf8(csv).unwrap();
    println!("\n{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    Ok(())
}
