//! The discrete phase-space action is stationary on classical paths.

use ncplane::classical::{discrete_action, free_particle_solution, Trajectory};
use ncplane::phasespace::{free_hamiltonian, PhasePoint};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.4);
    let h = free_hamiltonian(&p);
    let z0 = PhasePoint::new(0.0, 0.0, 1.0, 0.0);
    let n = 1000;
    let times: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let points = times.iter().map(|&t| free_particle_solution(z0, t, &p)).collect();
    let path = Trajectory::new(times, points)?;
    let s0 = discrete_action(&path, &h, &p)?;
    println!("S[classical] = {s0}");

    // bump x and p_y, keeping the endpoints fixed
    for d in [1e-3, 1e-4, 1e-5] {
        let mut q = path.clone();
        for (j, z) in q.points.iter_mut().enumerate() {
            let b = (std::f64::consts::PI * j as f64 / n as f64).sin();
            z.x += d * b;
            z.py += d * b;
        }
        println!("delta {d:.0e}: S - S0 = {:.3e}", discrete_action(&q, &h, &p)? - s0);
    }
    Ok(())
}
