//! Classical transport of Wigner functions along the oscillator flow.

use ncplane::phasespace::{sample_points, PhasePoint};
use ncplane::wigner::{evolve_liouville, flow_jacobian, FlowKind, WignerEvaluator};
use ncplane::NCParams;

fn main() -> ncplane::Result<()> {
    let p = NCParams::unit(0.6);
    let ground = WignerEvaluator::ground_state(&p)?;
    let coherent = WignerEvaluator::coherent(PhasePoint::new(1.0, 0.0, 0.0, 0.5), &p)?;
    let points = sample_points(100, 42, 2.0);
    for t in [0.7, 2.3, 5.0] {
        let g = evolve_liouville(&ground, t, FlowKind::Oscillator)?;
        let c = evolve_liouville(&coherent, t, FlowKind::Oscillator)?;
        let mut still = 0.0f64;
        let mut moved = 0.0f64;
        for z in &points {
            still = still.max((g.value(*z)? - ground.value(*z)?).abs());
            moved = moved.max((c.value(*z)? - coherent.value(*z)?).abs());
        }
        let det = flow_jacobian(FlowKind::Oscillator, points[0], t, &p)?.determinant();
        println!("t {t}: ground state change {still:.1e}, coherent state change {moved:.3}, det {det:.12}");
    }
    Ok(())
}
