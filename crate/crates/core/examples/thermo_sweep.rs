//! Entropy of an Einstein solid of NC oscillators over (T, theta).

use ncplane::thermo::{entropy_sweep, entropy_theta_slope, linspace, ThermoParams};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let tp = ThermoParams::new(1, NCParams::unit(0.0))?;
    let temps = linspace(0.1, 2.0, 5);
    let thetas = linspace(0.0, 2.0, 5);
    let sw = entropy_sweep(&temps, &thetas, &tp)?;
    print!("theta\\T ");
    for t in &temps {
        print!("{t:>9.3}");
    }
    println!();
    for (i, th) in thetas.iter().enumerate() {
        print!("{th:<8.2}");
        for k in 0..temps.len() {
            print!("{:>9.4}", sw.at(i, k).s_per_nkb);
        }
        println!();
    }
    println!("\ndS/dtheta at T = 0.2, theta = 1: {:.6}", entropy_theta_slope(0.2, &tp.with_theta(1.0))?);
    Ok(())
}
