use num_complex::Complex64;

use super::grid::{Basis, Grid2, GridFunction};
use super::spectrum::{check_level, effective_frequency, hermite_table};
use crate::error::{Error, Result};
use crate::params::NCParams;

/// Largest Gaussian factor allowed at the nearest grid edge.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Oscillator momentum width `sqrt(mħϖ)`.
pub fn momentum_width(p: &NCParams) -> Result<f64> {
    Ok((p.m * p.hbar * effective_frequency(p)?).sqrt())
}

/// Square `(p_x, p_y)` grid spanning `±widths·sqrt(mħϖ)`.
pub fn oscillator_grid(p: &NCParams, widths: f64, n: usize) -> Result<Grid2> {
    Grid2::square(widths * momentum_width(p)?, n)
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weights `c_k` of `H_{n−k}(ξ_x) H_k(ξ_y)` in `ψ_{n,j}`:
/// `c_k = Σ_{r+q=k} C(a,r) C(b,q) (−1)^q i^k`, `a = (n + 2j)/2`, `b = (n − 2j)/2`.
pub fn hermite_weights(n: u32, two_j: i32) -> Result<Vec<Complex64>> {
    check_level(n, two_j)?;
    let a = ((n as i32 + two_j) / 2) as u32;
    let b = ((n as i32 - two_j) / 2) as u32;
    let ik = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    Ok((0..=n)
        .map(|k| {
            let s: f64 = (0..=k)
                .map(|r| {
                    let q = k - r;
                    binomial(a, r) * binomial(b, q) * if q % 2 == 0 { 1.0 } else { -1.0 }
                })
                .sum();
            ik[(k % 4) as usize] * s
        })
        .collect())
}

/// `ψ_{n,j}(p)` on a momentum grid, renormalized to unit trapezoid norm.
///
/// `ψ ∝ e^{−p²/2mħϖ} Σ_k c_k H_{n−k}(p_x/σ) H_k(p_y/σ)` with `σ = sqrt(mħϖ)`.
pub fn eigenfunction(n: u32, two_j: i32, p: &NCParams, grid: Grid2) -> Result<GridFunction> {
    let weights = hermite_weights(n, two_j)?;
    let sigma = momentum_width(p)?;
    let edge = grid.a.min_edge().min(grid.b.min_edge());
    let tail = (-0.5 * (edge / sigma).powi(2)).exp();
    if tail > TAIL_TOLERANCE {
        return Err(Error::Truncation(format!(
            "Gaussian factor {tail:.2e} at the grid edge {edge:.3} exceeds {TAIL_TOLERANCE:.0e}; widen the grid beyond {:.3}",
            sigma * (2.0 * (1.0 / TAIL_TOLERANCE).ln()).sqrt()
        )));
    }
    GridFunction::from_fn(Basis::Momentum, grid, |px, py| {
        let (u, v) = (px / sigma, py / sigma);
        let hu = hermite_table(n, u);
        let hv = hermite_table(n, v);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in weights.iter().enumerate() {
            acc += c * (hu[n as usize - k] * hv[k]);
        }
        acc * (-0.5 * (u * u + v * v)).exp()
    })
    .normalized()
}

/// `e^{−p²/2mħϖ}/sqrt(π mħϖ)`.
pub fn ground_state_momentum(px: f64, py: f64, p: &NCParams) -> Result<f64> {
    let s2 = momentum_width(p)?.powi(2);
    Ok((-(px * px + py * py) / (2.0 * s2)).exp() / (std::f64::consts::PI * s2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::operators::{apply_angular_momentum, apply_hamiltonian, eigen_residual, Stencil};
    use crate::quantum::spectrum::energy;

    #[test]
    fn ground_state_matches_closed_form() {
        let p = NCParams::unit(0.6);
        let g = oscillator_grid(&p, 8.0, 128).unwrap();
        let psi = eigenfunction(0, 0, &p, g).unwrap();
        let worst = psi
            .map(|a, b, v| v - ground_state_momentum(a, b, &p).unwrap())
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn low_states_are_eigenfunctions() {
        let st = Stencil::default();
        for th in [0.0, 1.0] {
            let p = NCParams::unit(th);
            let g = oscillator_grid(&p, 8.0, 256).unwrap();
            for (n, tj) in [(1, -1), (2, 0), (3, 3)] {
                let psi = eigenfunction(n, tj, &p, g).unwrap();
                let h = apply_hamiltonian(&psi, &p, st).unwrap();
                let j = apply_angular_momentum(&psi, &p, st).unwrap();
                assert!(eigen_residual(&h, &psi, energy(n, tj, &p).unwrap(), st).unwrap() < 1e-6);
                assert!(eigen_residual(&j, &psi, tj as f64, st).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let p = NCParams::unit(0.0);
        let err = eigenfunction(0, 0, &p, oscillator_grid(&p, 5.0, 64).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Truncation(_)));
        assert!(eigenfunction(2, 1, &p, oscillator_grid(&p, 8.0, 64).unwrap()).is_err());
    }
}
