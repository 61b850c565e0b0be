//! Independent reference computations used to cross-check the closed forms:
//! brute-force spectral sums and finite differences. Deliberately naive.

use crate::error::Result;
use crate::phasespace::{PhaseField, PhasePoint};
use crate::quantum::energy;
use crate::thermo::ThermoParams;

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSum {
    pub value: f64,
    pub n_max: u32,
    /// Rigorous upper bound on the omitted levels `n > n_max`.
    pub tail_bound: f64,
}

/// Starting cutoff `ceil[k_BT/(a − |b|) · ln(1/ε)] + 10`.
pub fn initial_cutoff(t: f64, tp: &ThermoParams, eps_tail: f64) -> u32 {
    let [e_lo, _] = tp.mode_energies();
    ((tp.params.kb * t / e_lo) * (1.0 / eps_tail).ln()).ceil().max(0.0) as u32 + 10
}

/// Bound on `Σ_{n > n_max} Σ_j e^{−βE_{n,j}}` using
/// `Σ_j e^{−βE_{n,j}} ≤ (n+1) e^{−βa} x^n`, `x = e^{−β(a−|b|)}`.
pub fn tail_bound(n_max: u32, t: f64, tp: &ThermoParams) -> f64 {
    let beta = 1.0 / (tp.params.kb * t);
    let (a, _) = tp.mode_scales();
    let [e_lo, _] = tp.mode_energies();
    let x = (-beta * e_lo).exp();
    let m = n_max as f64 + 1.0;
    let lead = (m * (-beta * e_lo)).exp();
    (-beta * a).exp() * lead * ((m + 1.0) - m * x) / (1.0 - x).powi(2)
}

/// `Σ_{n ≤ n_max} Σ_j e^{−E_{n,j}/k_BT}`, with `n_max` grown until the tail
/// bound is below `eps_tail` times the partial sum.
pub fn direct_partition_sum(t: f64, tp: &ThermoParams, eps_tail: f64) -> Result<DirectSum> {
    crate::thermo::partition_single(t, tp)?;
    let beta = 1.0 / (tp.params.kb * t);
    let mut n_max = initial_cutoff(t, tp, eps_tail);
    loop {
        let mut acc = NeumaierSum::default();
        for n in (0..=n_max).rev() {
            for two_j in (-(n as i32)..=n as i32).step_by(2) {
                acc.add((-beta * energy(n, two_j, &tp.params)?).exp());
            }
        }
        let value = acc.value();
        let tail = tail_bound(n_max, t, tp);
        if tail <= eps_tail * value || n_max > 1_000_000 {
            return Ok(DirectSum {
                value,
                n_max,
                tail_bound: tail,
            });
        }
        n_max += n_max / 4 + 10;
    }
}

/// Central-difference gradient with step `cbrt(ε)·max(|z_i|, 1)`.
pub fn central_gradient<F: PhaseField + ?Sized>(f: &F, z: PhasePoint, t: f64) -> [f64; 4] {
    let base = z.to_array();
    let mut g = [0.0; 4];
    for (i, gi) in g.iter_mut().enumerate() {
        let h = f64::EPSILON.cbrt() * base[i].abs().max(1.0);
        let (mut up, mut dn) = (base, base);
        up[i] += h;
        dn[i] -= h;
        *gi = (f.value(PhasePoint::from_array(up), t) - f.value(PhasePoint::from_array(dn), t)) / (2.0 * h);
    }
    g
}

/// Central second difference `(f(t+h) − 2f(t) + f(t−h))/h²`.
pub fn second_difference(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)
}
