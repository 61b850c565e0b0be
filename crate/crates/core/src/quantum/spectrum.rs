use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::params::NCParams;

/// One oscillator level; `two_j` is twice the angular quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: u32,
    pub two_j: i32,
    #[serde(rename = "E")]
    pub energy: f64,
}

/// `|two_j| ≤ n` and `two_j ≡ n (mod 2)`.
pub fn check_level(n: u32, two_j: i32) -> Result<()> {
    if two_j.unsigned_abs() > n || (n as i64 - two_j as i64).rem_euclid(2) != 0 {
        return domain(format!("invalid level (n = {n}, two_j = {two_j})"));
    }
    Ok(())
}

/// `ϖ = ω / sqrt(1 + m²ω²θ²/4)`.
pub fn effective_frequency(p: &NCParams) -> Result<f64> {
    p.require_oscillator()?;
    Ok(p.omega / (1.0 + p.kappa()).sqrt())
}

/// `E = ħω sqrt(1 + m²ω²θ²/4)(n+1) − θmω²ħ·two_j/2`.
pub fn energy(n: u32, two_j: i32, p: &NCParams) -> Result<f64> {
    check_level(n, two_j)?;
    p.require_oscillator()?;
    let w = p.omega;
    Ok(p.hbar * w * (1.0 + p.kappa()).sqrt() * (n as f64 + 1.0)
        - 0.5 * p.theta * p.m * w * w * p.hbar * two_j as f64)
}

/// All levels with `n ≤ n_max`, ordered by `n` then `two_j`.
pub fn levels(n_max: u32, p: &NCParams) -> Result<Vec<SpectrumEntry>> {
    p.require_oscillator()?;
    let mut out = Vec::new();
    for n in 0..=n_max {
        for two_j in (-(n as i32)..=n as i32).step_by(2) {
            out.push(SpectrumEntry {
                n,
                two_j,
                energy: energy(n, two_j, p)?,
            });
        }
    }
    Ok(out)
}

pub fn write_spectrum_csv<W: Write>(entries: &[SpectrumEntry], mut w: W) -> Result<()> {
    writeln!(w, "n,two_j,E")?;
    for e in entries {
        writeln!(w, "{},{},{:.16e}", e.n, e.two_j, e.energy)?;
    }
    Ok(())
}

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: u32, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `H_0(x) … H_n(x)`.
pub fn hermite_table(n: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    for k in 1..n as usize {
        out.push(2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1]);
    }
    out
}
