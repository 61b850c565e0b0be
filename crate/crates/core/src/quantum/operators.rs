use num_complex::Complex64;
use serde::Serialize;

use super::grid::{Axis, Basis, Grid2, GridFunction};
use super::spectrum::effective_frequency;
use crate::error::{domain, Result};
use crate::params::NCParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Centered finite-difference stencils of order 4, 6 or 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stencil {
    order: usize,
}

pub const DEFAULT_ORDER: usize = 8;

impl Default for Stencil {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER }
    }
}

impl Stencil {
    pub fn new(order: usize) -> Result<Self> {
        match order {
            4 | 6 | 8 => Ok(Self { order }),
            _ => domain(format!("stencil order must be 4, 6 or 8, got {order}")),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes on each side of the center; also the boundary band excluded
    /// from residual norms.
    pub fn half_width(&self) -> usize {
        self.order / 2
    }

    /// First-derivative weights for offsets `1..=half_width` (antisymmetric).
    fn first(&self) -> &'static [f64] {
        match self.order {
            4 => &[2.0 / 3.0, -1.0 / 12.0],
            6 => &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
            _ => &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
        }
    }

    /// Second-derivative weights: center, then offsets `1..=half_width`.
    fn second(&self) -> (f64, &'static [f64]) {
        match self.order {
            4 => (-5.0 / 2.0, &[4.0 / 3.0, -1.0 / 12.0]),
            6 => (-49.0 / 18.0, &[3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0]),
            _ => (-205.0 / 72.0, &[8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    A,
    B,
}

fn step(g: &Grid2, dir: Direction) -> f64 {
    match dir {
        Direction::A => g.a.step,
        Direction::B => g.b.step,
    }
}

fn neighbor(psi: &GridFunction, i: usize, j: usize, dir: Direction, k: isize) -> Complex64 {
    match dir {
        Direction::A => psi.at_or_zero(i as isize + k, j as isize),
        Direction::B => psi.at_or_zero(i as isize, j as isize + k),
    }
}

/// `∂ψ` along one axis; values outside the grid count as zero.
pub fn d1(psi: &GridFunction, dir: Direction, st: Stencil) -> GridFunction {
    let h = step(&psi.grid, dir);
    let w = st.first();
    let nb = psi.grid.b.len;
    let values = (0..psi.grid.len())
        .map(|idx| {
            let (i, j) = (idx / nb, idx % nb);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in w.iter().enumerate() {
                let o = k as isize + 1;
                acc += (neighbor(psi, i, j, dir, o) - neighbor(psi, i, j, dir, -o)) * *c;
            }
            acc / h
        })
        .collect();
    GridFunction { values, ..*psi }
}

/// `∂²ψ` along one axis; values outside the grid count as zero.
pub fn d2(psi: &GridFunction, dir: Direction, st: Stencil) -> GridFunction {
    let h = step(&psi.grid, dir);
    let (c0, w) = st.second();
    let nb = psi.grid.b.len;
    let values = (0..psi.grid.len())
        .map(|idx| {
            let (i, j) = (idx / nb, idx % nb);
            let mut acc = psi.values[idx] * c0;
            for (k, c) in w.iter().enumerate() {
                let o = k as isize + 1;
                acc += (neighbor(psi, i, j, dir, o) + neighbor(psi, i, j, dir, -o)) * *c;
            }
            acc / (h * h)
        })
        .collect();
    GridFunction { values, ..*psi }
}

fn require_basis(psi: &GridFunction, b: Basis) -> Result<()> {
    if psi.basis != b {
        return domain(format!("operator needs a {b:?}-basis state, got {:?}", psi.basis));
    }
    Ok(())
}

/// `Ĵψ = iħ(p_y ∂_{p_x} − p_x ∂_{p_y})ψ`.
pub fn apply_angular_momentum(psi: &GridFunction, p: &NCParams, st: Stencil) -> Result<GridFunction> {
    require_basis(psi, Basis::Momentum)?;
    let dx = d1(psi, Direction::A, st);
    let dy = d1(psi, Direction::B, st);
    let g = psi.grid;
    let nb = g.b.len;
    let values = (0..g.len())
        .map(|k| {
            let (px, py) = g.point(k / nb, k % nb);
            I * p.hbar * (dx.values[k] * py - dy.values[k] * px)
        })
        .collect();
    Ok(GridFunction { values, ..*psi })
}

/// The oscillator Hamiltonian in the momentum basis,
/// `(1+κ)p²/2m − (ħ²mω²/2)∇²_p − (θmω²/2)Ĵ`, `κ = m²ω²θ²/4`.
pub fn apply_hamiltonian(psi: &GridFunction, p: &NCParams, st: Stencil) -> Result<GridFunction> {
    require_basis(psi, Basis::Momentum)?;
    p.require_oscillator()?;
    let lap_a = d2(psi, Direction::A, st);
    let lap_b = d2(psi, Direction::B, st);
    let j = apply_angular_momentum(psi, p, st)?;
    let (m, w) = (p.m, p.omega);
    let kin = (1.0 + p.kappa()) / (2.0 * m);
    let diff = 0.5 * p.hbar * p.hbar * m * w * w;
    let rot = 0.5 * p.theta * m * w * w;
    let g = psi.grid;
    let nb = g.b.len;
    let values = (0..g.len())
        .map(|k| {
            let (px, py) = g.point(k / nb, k % nb);
            psi.values[k] * (kin * (px * px + py * py)) - (lap_a.values[k] + lap_b.values[k]) * diff - j.values[k] * rot
        })
        .collect();
    Ok(GridFunction { values, ..*psi })
}

/// `‖Aψ − λψ‖ / ‖ψ‖` over the interior, excluding a band of
/// `st.half_width()` nodes.
pub fn eigen_residual(a_psi: &GridFunction, psi: &GridFunction, lambda: f64, st: Stencil) -> Result<f64> {
    let band = st.half_width();
    let target = psi.scaled(Complex64::new(lambda, 0.0));
    Ok(a_psi.distance_interior(&target, band)? / psi.norm_sq_interior(band).sqrt())
}

/// Warns when the grid is too coarse for the oscillator width `sqrt(mħϖ)`.
pub fn resolution_warning(grid: &Grid2, p: &NCParams) -> Option<String> {
    let sigma = (p.m * p.hbar * effective_frequency(p).ok()?).sqrt();
    let h = grid.a.step.max(grid.b.step);
    (h > 0.25 * sigma).then(|| {
        format!("grid spacing {h:.3e} exceeds a quarter of the oscillator width {sigma:.3e}; derivatives will be inaccurate")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeParticleCheck {
    pub expected: f64,
    pub measured: f64,
    pub residual: f64,
}

/// Free-particle eigenstate in the `(x, p_y)` representation:
/// `ψ = e^{ixp_{x0}/ħ} δ(p_y − p_{y0})`, with the delta taken as the discrete
/// delta on the nearest `p_y` node, checked against
/// `Ĥ = −(ħ²/2m)∂²_x + p_y²/2m`.
pub fn free_particle_eigencheck(px0: f64, py0: f64, p: &NCParams, grid: Grid2, st: Stencil) -> Result<FreeParticleCheck> {
    p.validate()?;
    let j0 = grid
        .b
        .nearest(py0)
        .ok_or_else(|| crate::Error::Domain(format!("p_y0 = {py0} is outside the p_y axis")))?;
    let py_node = grid.b.value(j0);
    let h = grid.b.step;
    let psi = GridFunction::from_fn(Basis::XPy, grid, |x, py| {
        if (py - py_node).abs() < 0.5 * h {
            Complex64::from_polar(1.0 / h, x * px0 / p.hbar)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let lap = d2(&psi, Direction::A, st);
    let hpsi = psi.combine(&lap, |v, l| -l * (p.hbar * p.hbar / (2.0 * p.m)) + v * (py_node * py_node / (2.0 * p.m)))?;
    let expected = (px0 * px0 + py0 * py0) / (2.0 * p.m);
    let band = st.half_width();
    // Rayleigh quotient over the interior
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for i in band..grid.a.len - band {
        let k = grid.index(i, j0);
        num += psi.values[k].conj() * hpsi.values[k];
        den += psi.values[k].norm_sqr();
    }
    let measured = num.re / den;
    Ok(FreeParticleCheck {
        expected,
        measured,
        residual: eigen_residual(&hpsi, &psi, expected, st)?,
    })
}

/// `(x, p_y)` axis pair for [`free_particle_eigencheck`].
pub fn free_particle_grid(x_half: f64, nx: usize, py_half: f64, npy: usize) -> Result<Grid2> {
    Ok(Grid2::new(Axis::symmetric(x_half, nx)?, Axis::symmetric(py_half, npy)?))
}
