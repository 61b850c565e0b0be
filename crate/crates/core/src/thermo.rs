//! Einstein solid of `N` distinguishable NC oscillators.
//!
//! Summing `e^{−βE_{n,j}}` over the spectrum factorizes into two geometric
//! series with mode energies `ε∓ = a ∓ |b|`, `a = ħωΘ/2`, `b = ħω²mθ/2`,
//! `Θ = sqrt(4 + m²ω²θ²)`:
//!
//! `Z₁ = 1 / (2[cosh(βa) − cosh(βb)]) = e^{−βa} / ((1 − e^{−βε−})(1 − e^{−βε+}))`.
//!
//! The hyperbolic cosines are the ones that come out of the sum; the
//! second form is what is evaluated, since it stays finite for any `β`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{derivative, second_derivative, Scalar};
use crate::error::{domain, Result};
use crate::params::NCParams;
use crate::quantum::energy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    pub n: u64,
    pub params: NCParams,
}

impl ThermoParams {
    pub fn new(n: u64, params: NCParams) -> Result<Self> {
        let tp = Self { n, params };
        tp.validate()?;
        Ok(tp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("oscillator count N must be at least 1");
        }
        self.params.require_oscillator()
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self {
            params: self.params.with_theta(theta),
            ..self
        }
    }

    /// `(a, |b|)`.
    pub fn mode_scales(&self) -> (f64, f64) {
        let p = &self.params;
        let big_theta = (4.0 + (p.m * p.omega * p.theta).powi(2)).sqrt();
        (
            0.5 * p.hbar * p.omega * big_theta,
            (0.5 * p.hbar * p.omega * p.omega * p.m * p.theta).abs(),
        )
    }

    /// The two effective mode energies `a − |b| < a + |b|`.
    pub fn mode_energies(&self) -> [f64; 2] {
        let (a, b) = self.mode_scales();
        [a - b, a + b]
    }

    /// `N k_B`.
    fn nk(&self) -> f64 {
        self.n as f64 * self.params.kb
    }
}

fn beta(t: f64, tp: &ThermoParams) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("temperature must be positive and finite, got {t}"));
    }
    tp.validate()?;
    Ok(1.0 / (tp.params.kb * t))
}

/// `ln(1 − e^{−y})` for `y > 0`.
fn ln_one_minus_exp(y: f64) -> f64 {
    (-(-y).exp_m1()).ln()
}

pub fn ln_partition_single(t: f64, tp: &ThermoParams) -> Result<f64> {
    let b = beta(t, tp)?;
    let (a, _) = tp.mode_scales();
    Ok(-b * a - tp.mode_energies().iter().map(|e| ln_one_minus_exp(b * e)).sum::<f64>())
}

pub fn partition_single(t: f64, tp: &ThermoParams) -> Result<f64> {
    Ok(ln_partition_single(t, tp)?.exp())
}

/// `A = −N k_B T ln Z₁`.
pub fn free_energy(t: f64, tp: &ThermoParams) -> Result<f64> {
    Ok(-tp.nk() * t * ln_partition_single(t, tp)?)
}

/// `S = N k_B Σ± [y/(e^y − 1) − ln(1 − e^{−y})]`, `y = βε±`.
pub fn entropy(t: f64, tp: &ThermoParams) -> Result<f64> {
    let b = beta(t, tp)?;
    let s: f64 = tp
        .mode_energies()
        .iter()
        .map(|e| {
            let y = b * e;
            y / y.exp_m1() - ln_one_minus_exp(y)
        })
        .sum();
    Ok(tp.nk() * s)
}

/// `U = N [a + Σ± ε±/(e^{βε±} − 1)]`, equal to
/// `N [a sinh(βa) − b sinh(βb)] / [cosh(βa) − cosh(βb)]`.
pub fn internal_energy(t: f64, tp: &ThermoParams) -> Result<f64> {
    let b = beta(t, tp)?;
    let (a, _) = tp.mode_scales();
    let occ: f64 = tp.mode_energies().iter().map(|e| e / (b * e).exp_m1()).sum();
    Ok(tp.n as f64 * (a + occ))
}

/// `C_V = N k_B Σ± y² e^{−y} / (1 − e^{−y})²`.
pub fn heat_capacity(t: f64, tp: &ThermoParams) -> Result<f64> {
    let b = beta(t, tp)?;
    let c: f64 = tp
        .mode_energies()
        .iter()
        .map(|e| {
            let y = b * e;
            let d = (-y).exp_m1();
            y * y * (-y).exp() / (d * d)
        })
        .sum();
    Ok(tp.nk() * c)
}

/// `∂S/∂θ = N k_B β Σ± f'(βε±) ∂ε±/∂θ` with `f'(y) = −y e^y/(e^y − 1)²`,
/// `∂a/∂θ = ħm²ω³θ/2Θ`, `∂|b|/∂θ = sign(θ) ħmω²/2`. Zero at `θ = 0`.
pub fn entropy_theta_slope(t: f64, tp: &ThermoParams) -> Result<f64> {
    let b = beta(t, tp)?;
    let p = &tp.params;
    let big_theta = (4.0 + (p.m * p.omega * p.theta).powi(2)).sqrt();
    let da = 0.5 * p.hbar * p.m * p.m * p.omega.powi(3) * p.theta / big_theta;
    let db = 0.5 * p.hbar * p.m * p.omega * p.omega * p.theta.signum();
    let db = if p.theta == 0.0 { 0.0 } else { db };
    let fprime = |e: f64| {
        let y = b * e;
        let d = (-y).exp_m1();
        // −y e^y/(e^y − 1)² = −y e^{−y}/(1 − e^{−y})²
        -y * (-y).exp() / (d * d)
    };
    let [lo, hi] = tp.mode_energies();
    Ok(tp.nk() * b * (fprime(lo) * (da - db) + fprime(hi) * (da + db)))
}

/// `e^{−E_{n,j}/k_BT} / Z₁`.
pub fn boltzmann_weight(n: u32, two_j: i32, t: f64, tp: &ThermoParams) -> Result<f64> {
    let b = beta(t, tp)?;
    let e = energy(n, two_j, &tp.params)?;
    Ok((-b * e - ln_partition_single(t, tp)?).exp())
}

/// `ln Z₁` in the hyperbolic-cosine form, generic for dual differentiation.
///
/// Written as `−βa − ln(1 + e^{−2βa} − e^{−βε−} − e^{−βε+})`, which is the
/// same expression with `e^{βa}/2` factored out of the cosh difference.
pub fn ln_partition_hyperbolic<S: Scalar>(t: S, tp: &ThermoParams) -> S {
    let (a, b) = tp.mode_scales();
    let beta = S::one() / t.scale(tp.params.kb);
    let e = |c: f64| (-beta.scale(c)).exp();
    -beta.scale(a) - (S::one() + e(2.0 * a) - e(a - b) - e(a + b)).ln()
}

fn free_energy_generic<S: Scalar>(t: S, tp: &ThermoParams) -> S {
    -(t * ln_partition_hyperbolic(t, tp)).scale(tp.nk())
}

/// `S = −∂A/∂T` by dual-number differentiation.
pub fn entropy_dual(t: f64, tp: &ThermoParams) -> Result<f64> {
    beta(t, tp)?;
    Ok(-derivative(|x| free_energy_generic(x, tp), t).1)
}

/// `C_V = −T ∂²A/∂T²` by nested dual numbers.
pub fn heat_capacity_dual(t: f64, tp: &ThermoParams) -> Result<f64> {
    beta(t, tp)?;
    Ok(-t * second_derivative(|x| free_energy_generic(x, tp), t).2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoPoint {
    #[serde(rename = "T")]
    pub t: f64,
    pub theta: f64,
    #[serde(rename = "Z1")]
    pub z1: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "Cv")]
    pub cv: f64,
    #[serde(rename = "S_per_NkB")]
    pub s_per_nkb: f64,
}

pub fn thermo_point(t: f64, tp: &ThermoParams) -> Result<ThermoPoint> {
    let s = entropy(t, tp)?;
    Ok(ThermoPoint {
        t,
        theta: tp.params.theta,
        z1: partition_single(t, tp)?,
        a: free_energy(t, tp)?,
        s,
        u: internal_energy(t, tp)?,
        cv: heat_capacity(t, tp)?,
        s_per_nkb: s / tp.nk(),
    })
}

/// Inclusive uniform grid `lo, …, hi` with `n` nodes (`n = 1` gives `lo`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropySweep {
    pub temperatures: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `theta`-major: `points[i * temperatures.len() + k]` is `(T_k, θ_i)`.
    pub points: Vec<ThermoPoint>,
}

impl EntropySweep {
    pub fn at(&self, i_theta: usize, k_t: usize) -> &ThermoPoint {
        &self.points[i_theta * self.temperatures.len() + k_t]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "T,theta,Z1,A,S,U,Cv,S_per_NkB")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.t, p.theta, p.z1, p.a, p.s, p.u, p.cv, p.s_per_nkb
            )?;
        }
        Ok(())
    }

    /// Gnuplot script drawing `S/Nk_B` as a surface over `(T, θ)`.
    pub fn surface_script(&self, csv_name: &str) -> String {
        format!(
            "set datafile separator ','\n\
             set key off\n\
             set xlabel 'T'\nset ylabel 'theta'\nset zlabel 'S/(N kB)'\n\
             set dgrid3d {rows},{cols} splines\n\
             set pm3d\n\
             splot '{csv_name}' every ::1 using 1:2:8 with pm3d\n\
             pause mouse close\n",
            rows = self.thetas.len(),
            cols = self.temperatures.len(),
        )
    }

    /// Gnuplot script drawing `S/Nk_B` against `T` for a few fixed `θ`.
    pub fn curves_script(&self, csv_name: &str, curves: usize) -> String {
        let nt = self.temperatures.len();
        let nth = self.thetas.len();
        let curves = curves.clamp(1, nth.max(1));
        let picks: Vec<usize> = if curves == 1 {
            vec![0]
        } else {
            (0..curves).map(|c| c * (nth - 1) / (curves - 1)).collect()
        };
        let mut s = String::from(
            "set datafile separator ','\nset xlabel 'T'\nset ylabel 'S/(N kB)'\nset key left top\nplot \\\n",
        );
        for (c, &i) in picks.iter().enumerate() {
            // +1 skips the header row
            let first = 1 + i * nt;
            let last = first + nt - 1;
            s.push_str(&format!(
                "  '{csv_name}' every ::{first}::{last} using 1:8 with lines title 'theta = {:.3}'{}\n",
                self.thetas[i],
                if c + 1 < picks.len() { ", \\" } else { "" }
            ));
        }
        s.push_str("pause mouse close\n");
        s
    }
}

/// Dense `(T, θ)` grid of thermodynamic quantities.
pub fn entropy_sweep(temperatures: &[f64], thetas: &[f64], tp: &ThermoParams) -> Result<EntropySweep> {
    if temperatures.is_empty() || thetas.is_empty() {
        return domain("sweep needs at least one temperature and one theta");
    }
    let points = thetas
        .par_iter()
        .map(|&th| {
            let tpt = tp.with_theta(th);
            temperatures.iter().map(|&t| thermo_point(t, &tpt)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(EntropySweep {
        temperatures: temperatures.to_vec(),
        thetas: thetas.to_vec(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(theta: f64) -> ThermoParams {
        ThermoParams::new(1, NCParams::unit(theta)).unwrap()
    }

    #[test]
    fn commutative_partition_function() {
        let tp = unit(0.0);
        for t in [0.1, 1.0, 7.0] {
            let x: f64 = (-1.0 / t).exp();
            let z = partition_single(t, &tp).unwrap();
            assert!((z / (x / (1.0 - x).powi(2)) - 1.0).abs() < 1e-13);
            let hyper = 1.0 / (2.0 * ((1.0 / t).cosh() - 1.0));
            assert!((z / hyper - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_form_matches_stable_form() {
        let tp = unit(1.3);
        let (a, b) = tp.mode_scales();
        for t in [0.2, 1.0, 5.0] {
            let hyper = (1.0 / (2.0 * ((a / t).cosh() - (b / t).cosh()))).ln();
            assert!((ln_partition_single(t, &tp).unwrap() - hyper).abs() < 1e-12);
            assert!((ln_partition_hyperbolic(t, &tp) - hyper).abs() < 1e-12);
        }
    }

    #[test]
    fn identities_hold() {
        for th in [0.0, 0.4, 2.0] {
            let tp = ThermoParams::new(3, NCParams::unit(th)).unwrap();
            for t in [0.05, 0.3, 1.0, 4.0, 30.0] {
                let pt = thermo_point(t, &tp).unwrap();
                assert!((pt.u - (pt.a + t * pt.s)).abs() <= 1e-10 * pt.u.abs());
                assert!((entropy_dual(t, &tp).unwrap() / pt.s - 1.0).abs() < 1e-8);
                assert!((heat_capacity_dual(t, &tp).unwrap() / pt.cv - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn even_in_theta() {
        for t in [0.1, 2.0] {
            let (p, m) = (thermo_point(t, &unit(0.7)).unwrap(), thermo_point(t, &unit(-0.7)).unwrap());
            assert_eq!(p.s, m.s);
            assert_eq!(p.u, m.u);
        }
    }

    #[test]
    fn low_temperature_limits() {
        let tp = unit(1.0);
        let e00 = (1.25f64).sqrt();
        assert!((internal_energy(0.01, &tp).unwrap() / e00 - 1.0).abs() < 1e-10);
        assert!(entropy(1e-3, &tp).unwrap() < 1e-10);
        assert!(heat_capacity(1e-3, &tp).unwrap() < 1e-10);
        assert!(ln_partition_single(1e-4, &tp).unwrap().is_finite());
        assert!((boltzmann_weight(0, 0, 0.01, &tp).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn high_temperature_series() {
        let tp = unit(1.0);
        let t = 100.0;
        let series = 2.0 * t + 3.0 / (12.0 * t);
        assert!((internal_energy(t, &tp).unwrap() / series - 1.0).abs() < 1e-6);
        let cv_series = 2.0 - 3.0 / (12.0 * t * t);
        assert!((heat_capacity(t, &tp).unwrap() / cv_series - 1.0).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        let tp = unit(0.0);
        assert!(partition_single(0.0, &tp).is_err());
        assert!(entropy(-1.0, &tp).is_err());
        assert!(ThermoParams::new(0, NCParams::unit(0.0)).is_err());
        assert!(ThermoParams::new(1, NCParams::unit(0.0).with_omega(0.0)).is_err());
        assert!(boltzmann_weight(1, 0, 1.0, &tp).is_err());
    }

    #[test]
    fn sweep_layout_and_scripts() {
        let sweep = entropy_sweep(&linspace(0.1, 1.0, 4), &linspace(0.0, 2.0, 3), &unit(0.0)).unwrap();
        assert_eq!(sweep.points.len(), 12);
        assert_eq!(sweep.at(2, 1).theta, 2.0);
        assert_eq!(sweep.at(2, 1).t, 0.4);
        let mut buf = Vec::new();
        sweep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("T,theta,Z1,A,S,U,Cv,S_per_NkB\n"));
        assert_eq!(text.lines().count(), 13);
        assert!(sweep.curves_script("s.csv", 3).contains("every ::9::12"));
    }

    #[test]
    fn theta_slope_matches_differences() {
        for &(t, th) in &[(0.2, 0.3), (0.2, 1.7), (1.5, -0.8), (0.05, 2.0)] {
            let tp = unit(th);
            let h = 1e-5;
            let fd = (entropy(t, &tp.with_theta(th + h)).unwrap() - entropy(t, &tp.with_theta(th - h)).unwrap()) / (2.0 * h);
            let a = entropy_theta_slope(t, &tp).unwrap();
            assert!((a - fd).abs() < 1e-7 * a.abs().max(1e-3), "{a} {fd}");
        }
        assert_eq!(entropy_theta_slope(0.7, &unit(0.0)).unwrap(), 0.0);
    }
}
