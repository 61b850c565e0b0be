//! Classical trajectories on the NC plane: RK4 integration of the deformed
//! Hamilton equations, the closed-form free-particle and oscillator
//! solutions, Noether-charge monitoring and the discrete phase-space action.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::dual::{Dual, Scalar};
use crate::error::{domain, Error, Result};
use crate::params::NCParams;
use crate::phasespace::{galilei_generators, gradient, PhaseField, PhasePoint};

/// Values of the six Galilei generators at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Charges {
    pub h: f64,
    pub p1: f64,
    pub p2: f64,
    pub j: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Charges {
    pub const NAMES: [&'static str; 6] = ["H", "p1", "p2", "J", "k1", "k2"];

    pub fn as_array(&self) -> [f64; 6] {
        [self.h, self.p1, self.p2, self.j, self.k1, self.k2]
    }
}

/// A time-ordered sampled path with optional charge history.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub charges: Option<Vec<Charges>>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, points: Vec<PhasePoint>) -> Result<Self> {
        if times.len() != points.len() {
            return domain(format!(
                "trajectory has {} times but {} points",
                times.len(),
                points.len()
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return domain("trajectory times must be strictly increasing");
        }
        Ok(Self {
            times,
            points,
            charges: None,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, PhasePoint)> {
        Some((*self.times.last()?, *self.points.last()?))
    }

    /// Largest deviation of each charge from its initial value, relative to
    /// `max(|initial|, 1)`.
    pub fn charge_drift(&self) -> Option<[f64; 6]> {
        let charges = self.charges.as_ref()?;
        let first = charges.first()?.as_array();
        let mut drift = [0.0f64; 6];
        for c in charges {
            for (k, v) in c.as_array().iter().enumerate() {
                let d = (v - first[k]).abs() / first[k].abs().max(1.0);
                drift[k] = drift[k].max(d);
            }
        }
        Some(drift)
    }

    /// CSV with header `t,x,y,px,py[,H,p1,p2,J,k1,k2]` at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::from("t,x,y,px,py");
        if self.charges.is_some() {
            for n in Charges::NAMES {
                header.push(',');
                header.push_str(n);
            }
        }
        writeln!(w, "{header}")?;
        for (i, (t, z)) in self.times.iter().zip(&self.points).enumerate() {
            let mut line = String::new();
            write!(line, "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", z.x, z.y, z.px, z.py).unwrap();
            if let Some(ch) = &self.charges {
                for v in ch[i].as_array() {
                    write!(line, ",{v:.16e}").unwrap();
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Phase-space velocity `ż = {z, H}` for the deformed bracket.
pub fn phase_velocity<H: PhaseField + ?Sized>(h: &H, z: [f64; 4], t: f64, theta: f64) -> [f64; 4] {
    let g = gradient(h, z, t);
    [g[2] + theta * g[1], g[3] - theta * g[0], -g[0], -g[1]]
}

fn axpy(z: &[f64; 4], a: f64, k: &[f64; 4]) -> [f64; 4] {
    [z[0] + a * k[0], z[1] + a * k[1], z[2] + a * k[2], z[3] + a * k[3]]
}

/// Fixed-step classical RK4 on `q̇_i = ∂H/∂p_i + θ ε_ij ∂H/∂q_j`,
/// `ṗ_i = −∂H/∂q_i`.
///
/// The step is shrunk slightly if needed so that the samples land exactly
/// on `t1`.
pub fn hamiltonian_flow<H: PhaseField + ?Sized>(
    h: &H,
    z0: PhasePoint,
    t0: f64,
    t1: f64,
    dt: f64,
    p: &NCParams,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t1 > t0) {
        return domain(format!("need dt > 0 and t1 > t0, got dt = {dt}, [{t0}, {t1}]"));
    }
    if !z0.is_finite() {
        return domain("initial point must be finite");
    }
    let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let step = (t1 - t0) / steps as f64;
    let th = p.theta;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut z = z0.to_array();
    times.push(t0);
    points.push(z0);
    for n in 0..steps {
        let t = t0 + n as f64 * step;
        let k1 = phase_velocity(h, z, t, th);
        let k2 = phase_velocity(h, axpy(&z, 0.5 * step, &k1), t + 0.5 * step, th);
        let k3 = phase_velocity(h, axpy(&z, 0.5 * step, &k2), t + 0.5 * step, th);
        let k4 = phase_velocity(h, axpy(&z, step, &k3), t + step, th);
        let mut next = z;
        for i in 0..4 {
            next[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { last_t: t });
        }
        z = next;
        times.push(if n + 1 == steps { t1 } else { t0 + (n + 1) as f64 * step });
        points.push(PhasePoint::from_array(z));
    }
    Trajectory::new(times, points)
}

/// `q(t) = q0 + p0 t / m`, `p(t) = p0`, for every theta.
pub fn free_particle_solution(z0: PhasePoint, t: f64, p: &NCParams) -> PhasePoint {
    PhasePoint::from_array(free_flow(z0.to_array(), t, p.m))
}

pub(crate) fn free_flow<S: Scalar>(z0: [S; 4], t: S, m: f64) -> [S; 4] {
    let inv_m = S::from_f64(1.0 / m);
    [z0[0] + z0[2] * t * inv_m, z0[1] + z0[3] * t * inv_m, z0[2], z0[3]]
}

/// Mixing frequencies of the NC oscillator,
/// `φ, χ = sqrt(ω² + ½m²θ²ω⁴ ± ½mθω³ sqrt(4 + m²θ²ω²))`.
pub fn oscillator_frequencies(p: &NCParams) -> Result<(f64, f64)> {
    p.require_oscillator()?;
    // phi, chi = (sqrt(d² + 4ω²) ± d)/2 with d = mθω²; the smaller one is
    // taken from phi chi = ω² to avoid cancellation
    let w2 = p.omega * p.omega;
    let d = p.m * p.theta * w2;
    let s = d.hypot(2.0 * p.omega);
    if d >= 0.0 {
        let phi = 0.5 * (s + d);
        Ok((phi, w2 / phi))
    } else {
        let chi = 0.5 * (s - d);
        Ok((w2 / chi, chi))
    }
}

/// Closed-form NC oscillator solution in terms of initial positions and
/// velocities, through the four mixing functions `T₁ … T₄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorClosedForm {
    pub phi: f64,
    pub chi: f64,
    m: f64,
    omega: f64,
    theta: f64,
    root: f64,
}

impl OscillatorClosedForm {
    pub fn new(p: &NCParams) -> Result<Self> {
        let (phi, chi) = oscillator_frequencies(p)?;
        Ok(Self {
            phi,
            chi,
            m: p.m,
            omega: p.omega,
            theta: p.theta,
            root: (4.0 + (p.m * p.omega * p.theta).powi(2)).sqrt(),
        })
    }

    /// `[T₁(t), T₂(t), T₃(t), T₄(t)]`.
    pub fn mixing<S: Scalar>(&self, t: S) -> [S; 4] {
        let (phi, chi, w) = (self.phi, self.chi, self.omega);
        let (cp, cc) = ((t.scale(phi)).cos(), (t.scale(chi)).cos());
        let (sp, sc) = ((t.scale(phi)).sin(), (t.scale(chi)).sin());
        let t1 = (cp + cc).scale(0.5);
        let t2 = (sc.scale(phi) + sp.scale(chi)).scale(0.5 / (w * w));
        let t3 = (cc - cp).scale(0.5 / (w * self.root));
        let t4 = (sc.scale(phi) - sp.scale(chi)).scale(0.5 / (w * self.root));
        [t1, t2, t3, t4]
    }

    /// Positions at time `t` from `(x₀, ẋ₀, y₀, ẏ₀)`.
    pub fn positions<S: Scalar>(&self, x0: S, xd0: S, y0: S, yd0: S, t: S) -> (S, S) {
        let [t1, t2, t3, t4] = self.mixing(t);
        let mtw2 = self.m * self.theta * self.omega * self.omega;
        let mt = self.m * self.theta;
        let two = S::from_f64(2.0);
        let x = t1 * x0 + t2 * xd0 + t3 * (x0.scale(mtw2) + two * yd0) - t4 * (xd0.scale(mt) + two * y0);
        let y = t1 * y0 + t2 * yd0 + t3 * (y0.scale(mtw2) - two * xd0) - t4 * (yd0.scale(mt) - two * x0);
        (x, y)
    }

    /// Initial velocities from canonical momenta:
    /// `ẋ = p_x/m + θmω²y`, `ẏ = p_y/m − θmω²x`.
    pub fn velocities_from_state<S: Scalar>(&self, z: [S; 4]) -> (S, S) {
        let c = self.theta * self.m * self.omega * self.omega;
        let inv_m = 1.0 / self.m;
        (z[2].scale(inv_m) + z[1].scale(c), z[3].scale(inv_m) - z[0].scale(c))
    }

    /// Inverse of [`Self::velocities_from_state`] at given positions.
    pub fn momenta_from_velocities<S: Scalar>(&self, x: S, y: S, xd: S, yd: S) -> (S, S) {
        let c = self.theta * self.m * self.omega * self.omega;
        ((xd - y.scale(c)).scale(self.m), (yd + x.scale(c)).scale(self.m))
    }

    /// The full phase-space flow map `z0 ↦ z(t)`, generic so that its
    /// Jacobian can be taken with dual numbers.
    pub fn flow<S: Scalar>(&self, z0: [S; 4], t: S) -> [S; 4] {
        let (xd0, yd0) = self.velocities_from_state(z0);
        let lift = Dual::constant;
        let (x, y) = self.positions(lift(z0[0]), lift(xd0), lift(z0[1]), lift(yd0), Dual::variable(t));
        let (px, py) = self.momenta_from_velocities(x.re, y.re, x.eps, y.eps);
        [x.re, y.re, px, py]
    }
}

/// Oscillator state at time `t` from the canonical initial state `z0`.
pub fn oscillator_solution(z0: PhasePoint, t: f64, p: &NCParams) -> Result<PhasePoint> {
    let cf = OscillatorClosedForm::new(p)?;
    if t == 0.0 {
        return Ok(z0);
    }
    Ok(PhasePoint::from_array(cf.flow(z0.to_array(), t)))
}

/// Positions from the small-theta picture: the commutative oscillator
/// rotated with angular velocity `mθω²/2`.
///
/// The commutative reference is started with the rotating-frame velocity
/// `ż₀ + iΩz₀` (`z = x + iy`, `Ω = mθω²/2`) and frequency `ω`, so its error
/// against the exact solution is secular and quadratic in `mθω²/ω`.
pub fn small_theta_rotation(z0: PhasePoint, t: f64, p: &NCParams) -> Result<(f64, f64)> {
    let cf = OscillatorClosedForm::new(p)?;
    let w = p.omega;
    let big_omega = 0.5 * p.m * p.theta * w * w;
    let (xd, yd) = cf.velocities_from_state(z0.to_array());
    // rotating-frame initial velocity
    let (ud_re, ud_im) = (xd - big_omega * z0.y, yd + big_omega * z0.x);
    let (c, s) = ((w * t).cos(), (w * t).sin());
    let u_re = z0.x * c + ud_re / w * s;
    let u_im = z0.y * c + ud_im / w * s;
    let (cr, sr) = ((big_omega * t).cos(), (big_omega * t).sin());
    // (u_re + i u_im) e^{-iΩt}
    Ok((u_re * cr + u_im * sr, u_im * cr - u_re * sr))
}

/// Attaches the Galilei charges `H, p_i, J, k_i(t)` to every sample.
pub fn noether_charges(traj: &Trajectory, p: &NCParams) -> Trajectory {
    let g = galilei_generators(p);
    let charges = traj
        .times
        .iter()
        .zip(&traj.points)
        .map(|(&t, &z)| Charges {
            h: g.h.value(z, t),
            p1: g.p1.value(z, t),
            p2: g.p2.value(z, t),
            j: g.j.value(z, t),
            k1: g.k1.value(z, t),
            k2: g.k2.value(z, t),
        })
        .collect();
    Trajectory {
        charges: Some(charges),
        ..traj.clone()
    }
}

/// Left-point discrete action
/// `Σ ε [Δx/ε · p_x − Δp_y/ε · y + θ Δp_y/ε · p_x − H(z_j)]`.
pub fn discrete_action<H: PhaseField + ?Sized>(path: &Trajectory, h: &H, p: &NCParams) -> Result<f64> {
    if path.len() < 2 {
        return domain("discrete action needs at least two samples");
    }
    let eps = path.times[1] - path.times[0];
    let uniform = path
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - eps).abs() <= 1e-9 * eps.abs().max(1.0));
    if !uniform {
        return domain("discrete action needs a uniform time step");
    }
    let mut s = 0.0;
    for j in 0..path.len() - 1 {
        let (a, b) = (path.points[j], path.points[j + 1]);
        let dpy = b.py - a.py;
        s += (b.x - a.x) * a.px - dpy * a.y + p.theta * dpy * a.px - eps * h.value(a, path.times[j]);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::{free_hamiltonian, oscillator_hamiltonian};

    #[test]
    fn free_particle_rk4_is_exact_for_linear_motion() {
        let p = NCParams::unit(0.4);
        let traj = hamiltonian_flow(&free_hamiltonian(&p), PhasePoint::new(0.0, 0.0, 1.0, 2.0), 0.0, 1.0, 1e-2, &p).unwrap();
        let (t, z) = traj.last().unwrap();
        assert_eq!(t, 1.0);
        assert!(z.distance(&PhasePoint::new(1.0, 2.0, 1.0, 2.0)) < 1e-10);
    }

    #[test]
    fn free_particle_closed_form() {
        let z0 = PhasePoint::new(0.3, -0.2, 2.0, 0.0);
        let p = NCParams::default().with_m(2.0);
        assert_eq!(free_particle_solution(z0, 0.0, &p), z0);
        let z = free_particle_solution(z0, 1.0, &p);
        assert_eq!(z, PhasePoint::new(1.3, -0.2, 2.0, 0.0));
        assert_eq!(z, free_particle_solution(z0, 1.0, &p.with_theta(3.0)));
    }

    #[test]
    fn frequencies_commutative_limit_and_identities() {
        let (phi, chi) = oscillator_frequencies(&NCParams::unit(0.0).with_omega(1.7)).unwrap();
        assert_eq!(phi, 1.7);
        assert_eq!(chi, 1.7);
        for &(m, w, th) in &[(1.0, 1.0, 0.3), (2.5, 0.4, 1.7), (0.1, 3.0, 0.01)] {
            let p = NCParams::new(m, w, th, 1.0, 1.0).unwrap();
            let (phi, chi) = oscillator_frequencies(&p).unwrap();
            assert!(phi >= chi && chi > 0.0);
            assert!((phi * chi / (w * w) - 1.0).abs() < 1e-12);
            assert!(((phi - chi) / (m * th * w * w) - 1.0).abs() < 1e-12);
        }
        assert!(oscillator_frequencies(&NCParams::default().with_omega(0.0)).is_err());
    }

    #[test]
    fn closed_form_reduces_to_standard_oscillator() {
        let p = NCParams::unit(0.0).with_omega(1.3);
        let cf = OscillatorClosedForm::new(&p).unwrap();
        let [_, _, t3, t4] = cf.mixing(2.1);
        assert!(t3.abs() < 1e-14 && t4.abs() < 1e-14);
        let (x, _) = cf.positions(0.4, 0.9, 0.0, 0.0, 2.1);
        let exact = 0.4 * (1.3f64 * 2.1).cos() + 0.9 / 1.3 * (1.3f64 * 2.1).sin();
        assert!((x - exact).abs() < 1e-14);
    }

    #[test]
    fn oscillator_solution_at_zero_time_is_identity() {
        let z0 = PhasePoint::new(0.1, 0.2, 0.3, 0.4);
        assert_eq!(oscillator_solution(z0, 0.0, &NCParams::unit(0.6)).unwrap(), z0);
        // the flow map itself also reproduces z0 at t = 0 up to rounding
        let cf = OscillatorClosedForm::new(&NCParams::unit(0.6)).unwrap();
        let z = PhasePoint::from_array(cf.flow(z0.to_array(), 0.0));
        assert!(z.distance(&z0) < 1e-15);
    }

    #[test]
    fn momentum_velocity_roundtrip() {
        let cf = OscillatorClosedForm::new(&NCParams::new(1.3, 0.8, 0.45, 1.0, 1.0).unwrap()).unwrap();
        let z = [0.2, -0.5, 1.1, 0.7];
        let (xd, yd) = cf.velocities_from_state(z);
        let (px, py) = cf.momenta_from_velocities(z[0], z[1], xd, yd);
        assert!((px - z[2]).abs() < 1e-15 && (py - z[3]).abs() < 1e-15);
    }

    #[test]
    fn oscillator_charges_h_and_j_conserved_boosts_not() {
        let p = NCParams::unit(0.3);
        let traj = hamiltonian_flow(&oscillator_hamiltonian(&p), PhasePoint::new(1.0, 0.0, 0.0, 1.0), 0.0, 5.0, 1e-3, &p).unwrap();
        let with = noether_charges(&traj, &p);
        // H of the charge table is the free Hamiltonian; compare the full
        // oscillator energy and J directly
        let osc = oscillator_hamiltonian(&p);
        let e0 = osc.value(traj.points[0], 0.0);
        let worst = traj.points.iter().map(|z| (osc.value(*z, 0.0) - e0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8);
        let drift = with.charge_drift().unwrap();
        assert!(drift[3] < 1e-8, "J drift {}", drift[3]);
        assert!(drift[4] > 1e-2 && drift[5] > 1e-2);
    }

    #[test]
    fn discrete_action_needs_two_samples() {
        let p = NCParams::default();
        let t = Trajectory::new(vec![0.0], vec![PhasePoint::ORIGIN]).unwrap();
        assert!(discrete_action(&t, &free_hamiltonian(&p), &p).is_err());
    }

    #[test]
    fn constant_path_has_zero_action() {
        let p = NCParams::unit(0.5);
        let times: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let pts = vec![PhasePoint::new(1.0, 2.0, 0.0, 0.0); 11];
        let t = Trajectory::new(times, pts).unwrap();
        assert_eq!(discrete_action(&t, &free_hamiltonian(&p), &p).unwrap(), 0.0);
    }

    #[test]
    fn trajectory_invariants() {
        assert!(Trajectory::new(vec![0.0, 0.0], vec![PhasePoint::ORIGIN; 2]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![PhasePoint::ORIGIN]).is_err());
        assert!(hamiltonian_flow(&free_hamiltonian(&NCParams::default()), PhasePoint::ORIGIN, 1.0, 0.0, 0.1, &NCParams::default()).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        use crate::phasespace::Field;
        let p = NCParams::default();
        // ṗ_x = -∂H/∂x = x^... blow-up: H = -x^4 gives explosive growth
        let h = -1.0 * Field::x().powi(4) + 0.5 * Field::px().powi(2);
        let err = hamiltonian_flow(&h, PhasePoint::new(10.0, 0.0, 10.0, 0.0), 0.0, 100.0, 0.5, &p).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }
}
