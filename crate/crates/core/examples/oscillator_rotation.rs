//! The NC oscillator in closed form, and its small-theta picture as a
//! slowly rotating commutative oscillator.

use ncplane::classical::{hamiltonian_flow, oscillator_frequencies, oscillator_solution, small_theta_rotation};
use ncplane::phasespace::{oscillator_hamiltonian, PhasePoint};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let z0 = PhasePoint::new(1.0, 0.0, 0.0, 1.0);
    for theta in [0.0, 0.1, 1.0] {
        let p = NCParams::unit(theta);
        let (phi, chi) = oscillator_frequencies(&p)?;
        println!("theta {theta:<4} phi {phi:.6} chi {chi:.6} phi*chi {:.6} phi-chi {:.6}", phi * chi, phi - chi);
    }

    let p = NCParams::unit(0.3);
    let traj = hamiltonian_flow(&oscillator_hamiltonian(&p), z0, 0.0, 10.0, 1e-3, &p)?;
    let worst = traj
        .times
        .iter()
        .zip(&traj.points)
        .map(|(&t, z)| z.distance(&oscillator_solution(z0, t, &p).unwrap()))
        .fold(0.0, f64::max);
    println!("\nmax |RK4 - closed form| over t in [0, 10]: {worst:.2e}");

    println!("\ntheta     max error of the rotating picture");
    for theta in [0.04, 0.02, 0.01] {
        let p = NCParams::unit(theta);
        let err = (0..=100)
            .map(|k| {
                let t = 0.1 * k as f64;
                let e = oscillator_solution(z0, t, &p).unwrap();
                let (x, y) = small_theta_rotation(z0, t, &p).unwrap();
                (x - e.x).hypot(y - e.y)
            })
            .fold(0.0, f64::max);
        println!("{theta:<9} {err:.3e}");
    }
    Ok(())
}
