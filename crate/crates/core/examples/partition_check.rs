//! Closed-form single-oscillator partition function against a direct sum
//! over the spectrum.

use ncplane::oracles::direct_partition_sum;
use ncplane::thermo::{internal_energy, partition_single, ThermoParams};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let tp = ThermoParams::new(1, NCParams::unit(1.0))?;
    for t in [0.1, 1.0, 10.0] {
        let z = partition_single(t, &tp)?;
        let d = direct_partition_sum(t, &tp, 1e-15)?;
        println!(
            "T {t:<5} Z1 {z:.15e}  direct {:.15e}  (n <= {}, rel diff {:.1e})",
            d.value,
            d.n_max,
            (z - d.value).abs() / z
        );
    }
    println!("U at T = 1e4: {:.6} (classical 2T = 20000)", internal_energy(1e4, &tp)?);
    Ok(())
}
