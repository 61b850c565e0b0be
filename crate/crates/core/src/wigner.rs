//! Wigner functions on the four-dimensional NC phase space.
//!
//! For a pure state in the `(x, p_y)` representation
//!
//! `W(z) = (1/π²ħ²) ∫dζdη e^{2i(ζp_x − ηy + θηp_x)/ħ} ψ(x−ζ, p_y−η) ψ*(x+ζ, p_y+η)`.
//!
//! At fixed `(x, p_y)` the exponent only involves `p_x` and `s = y − θp_x`,
//! so on the grid nodes of `ψ` a whole `(p_x, s)` plane of values is one 2D
//! FFT of the product array. Four-dimensional integrals are then iterated
//! sums: outer trapezoid over strided `(x, p_y)` nodes, inner sum over the
//! FFT plane (`dy dp_x = ds dp_x`).

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::classical::{free_flow, OscillatorClosedForm};
use crate::dual::{Dual, Scalar};
use crate::error::{domain, Error, Result};
use crate::params::NCParams;
use crate::phasespace::{Coord, PhaseField, PhasePoint};
use crate::quantum::eigen::momentum_width;
use crate::quantum::grid::{Axis, Basis, Grid2, GridFunction};
use crate::quantum::kernels::{transform, transform_conjugate};
use crate::quantum::spectrum::effective_frequency;
use crate::quantum::eigenfunction;

/// Hamiltonians whose Liouville flow is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowKind {
    Free,
    Oscillator,
    /// Anything else; evolution is refused.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Half width of default state grids, in oscillator widths.
    pub widths: f64,
    /// Minimum node count per axis of default state grids.
    pub nodes: usize,
    /// Stride of the outer `(x, p_y)` trapezoid over grid nodes.
    pub outer_stride: usize,
    /// Largest `|ψ|` allowed on the grid boundary, relative to `max |ψ|`.
    pub edge_tolerance: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            widths: 8.0,
            nodes: 96,
            outer_stride: 2,
            edge_tolerance: 1e-6,
        }
    }
}

/// Smallest outer stride for closed-form sources; their Gaussians are
/// smooth on the scale of four state-grid steps.
pub const ANALYTIC_STRIDE: usize = 4;

/// Absolute bound on the imaginary residue of lattice values.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

/// Closed-form Wigner function of the displaced oscillator ground state,
/// `W₀₀(z − c)` with
/// `W₀₀ = (1/π²ħ²) exp{−p²/mħϖ − (mϖ/ħ)[(x + θp_y/2)² + (y − θp_x/2)²]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWigner {
    pub center: PhasePoint,
    m: f64,
    varpi: f64,
    hbar: f64,
    theta: f64,
}

impl GaussianWigner {
    pub fn new(center: PhasePoint, p: &NCParams) -> Result<Self> {
        Ok(Self {
            center,
            m: p.m,
            varpi: effective_frequency(p)?,
            hbar: p.hbar,
            theta: p.theta,
        })
    }
}

impl PhaseField for GaussianWigner {
    fn eval<S: Scalar>(&self, z: [S; 4], _t: S) -> S {
        let c = self.center.to_array();
        let d = [z[0] - S::from_f64(c[0]), z[1] - S::from_f64(c[1]), z[2] - S::from_f64(c[2]), z[3] - S::from_f64(c[3])];
        let mhw = self.m * self.hbar * self.varpi;
        let u = d[0] + d[3].scale(0.5 * self.theta);
        let v = d[1] - d[2].scale(0.5 * self.theta);
        let expo = (d[2] * d[2] + d[3] * d[3]).scale(-1.0 / mhw) - (u * u + v * v).scale(self.m * self.varpi / self.hbar);
        expo.exp().scale(1.0 / (PI * PI * self.hbar * self.hbar))
    }

    fn name(&self) -> String {
        "W00".into()
    }
}

/// `W₀₀(z)` for the oscillator ground state.
pub fn wigner_ground_state(z: PhasePoint, p: &NCParams) -> Result<f64> {
    Ok(GaussianWigner::new(PhasePoint::ORIGIN, p)?.value(z, 0.0))
}

#[derive(Debug, Clone)]
enum Source {
    Pure(GridFunction),
    Mixed(Vec<(f64, GridFunction)>),
    Gaussian(GaussianWigner),
    /// `W₀(M z)` with `M` the (linear) backward flow `Φ₋ₜ`.
    Evolved {
        base: Box<WignerEvaluator>,
        back: Matrix4<f64>,
    },
}

/// A Wigner function together with the data needed to evaluate and
/// integrate it.
#[derive(Debug, Clone)]
pub struct WignerEvaluator {
    source: Source,
    params: NCParams,
    settings: QuadratureSettings,
}

/// Default `(x, p_y)` grid: `x ∈ ±(wσ_x + (w/2)|θ|σ_p)`, `p_y ∈ ±wσ_p`, with
/// enough nodes that the FFT planes cover `±wσ_p` in `p_x` and the full
/// spread of `s = y − θp_x`.
pub fn state_grid(p: &NCParams, settings: &QuadratureSettings) -> Result<Grid2> {
    let sp = momentum_width(p)?;
    let sx = p.hbar / sp;
    let w = settings.widths;
    let lx = w * sx + 0.5 * w * p.theta.abs() * sp;
    let lp = w * sp;
    let need = (4.0 * lx * lp.max(lx) / (PI * p.hbar)).ceil() as usize + 2;
    let n = settings.nodes.max(need);
    Ok(Grid2::new(Axis::symmetric(lx, n)?, Axis::symmetric(lp, n)?))
}

/// `ψ_{n,j}` in the `(x, p_y)` representation on [`state_grid`].
pub fn eigenstate_xpy(n: u32, two_j: i32, p: &NCParams, settings: &QuadratureSettings) -> Result<GridFunction> {
    let target = state_grid(p, settings)?;
    let sp = momentum_width(p)?;
    let lpx = settings.widths * sp;
    let reach = target.a.max_abs() + 0.5 * p.theta.abs() * target.b.max_abs();
    let need = (2.0 * lpx * reach / (PI * p.hbar) * 1.05).ceil() as usize + 2;
    let px = Axis::symmetric(lpx, target.a.len.max(need))?;
    let psi = eigenfunction(n, two_j, p, Grid2::new(px, target.b))?;
    transform(&psi, Basis::XPy, target, p)?.normalized()
}

fn to_xpy(psi: &GridFunction, p: &NCParams) -> Result<GridFunction> {
    match psi.basis {
        Basis::XPy => Ok(psi.clone()),
        _ => transform_conjugate(psi, Basis::XPy, p),
    }
}

fn check_edges(psi: &GridFunction, tol: f64) -> Result<()> {
    let g = psi.grid;
    let peak = psi.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut edge = 0.0f64;
    for i in 0..g.a.len {
        edge = edge.max(psi.at(i, 0).norm()).max(psi.at(i, g.b.len - 1).norm());
    }
    for j in 0..g.b.len {
        edge = edge.max(psi.at(0, j).norm()).max(psi.at(g.a.len - 1, j).norm());
    }
    if edge > tol * peak {
        return Err(Error::Accuracy(format!(
            "state support is truncated: boundary value {edge:.2e} vs peak {peak:.2e}"
        )));
    }
    Ok(())
}

impl WignerEvaluator {
    /// Pure state; momentum and `(y, p_x)` states are first transformed to
    /// the `(x, p_y)` representation.
    pub fn from_state(psi: &GridFunction, p: &NCParams, settings: QuadratureSettings) -> Result<Self> {
        p.validate()?;
        let psi = to_xpy(psi, p)?;
        let n2 = psi.norm_sq();
        if (n2 - 1.0).abs() > 1e-6 {
            return domain(format!("Wigner transform needs a normalized state, got norm² = {n2}"));
        }
        check_edges(&psi, settings.edge_tolerance)?;
        Ok(Self {
            source: Source::Pure(psi),
            params: *p,
            settings,
        })
    }

    /// Oscillator eigenstate `ψ_{n,j}` on the default grid.
    pub fn eigenstate(n: u32, two_j: i32, p: &NCParams, settings: QuadratureSettings) -> Result<Self> {
        let psi = eigenstate_xpy(n, two_j, p, &settings)?;
        Self::from_state(&psi, p, settings)
    }

    /// `ρ = Σ w_n |ψ_n⟩⟨ψ_n|`, weights summing to one within 1e−12.
    pub fn mixed(components: &[(f64, GridFunction)], p: &NCParams, settings: QuadratureSettings) -> Result<Self> {
        if components.is_empty() {
            return domain("mixed state needs at least one component");
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > 1e-12 || components.iter().any(|c| c.0 < 0.0) {
            return domain(format!("mixture weights must be non-negative and sum to 1, got {total}"));
        }
        let mut out = Vec::with_capacity(components.len());
        for (w, psi) in components {
            let e = Self::from_state(psi, p, settings)?;
            let Source::Pure(psi) = e.source else { unreachable!() };
            if let Some((_, first)) = out.first() {
                let first: &GridFunction = first;
                if !first.grid.a.same_as(&psi.grid.a) || !first.grid.b.same_as(&psi.grid.b) {
                    return domain("mixture components must share one grid");
                }
            }
            out.push((*w, psi));
        }
        Ok(Self {
            source: Source::Mixed(out),
            params: *p,
            settings,
        })
    }

    pub fn ground_state(p: &NCParams) -> Result<Self> {
        Self::coherent(PhasePoint::ORIGIN, p)
    }

    /// Displaced ground state `W₀₀(z − c)`.
    pub fn coherent(center: PhasePoint, p: &NCParams) -> Result<Self> {
        Ok(Self {
            source: Source::Gaussian(GaussianWigner::new(center, p)?),
            params: *p,
            settings: QuadratureSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: QuadratureSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn params(&self) -> &NCParams {
        &self.params
    }

    pub fn settings(&self) -> &QuadratureSettings {
        &self.settings
    }

    /// The pure `(x, p_y)` state behind this evaluator, if any.
    pub fn state(&self) -> Option<&GridFunction> {
        match &self.source {
            Source::Pure(psi) => Some(psi),
            _ => None,
        }
    }

    pub fn is_grid_based(&self) -> bool {
        match &self.source {
            Source::Pure(_) | Source::Mixed(_) => true,
            Source::Gaussian(_) => false,
            Source::Evolved { base, .. } => base.is_grid_based(),
        }
    }

    /// `W(z)`.
    pub fn value(&self, z: PhasePoint) -> Result<f64> {
        match &self.source {
            Source::Pure(psi) => wigner_from_state(psi, z, &self.params),
            Source::Mixed(c) => {
                let mut acc = 0.0;
                for (w, psi) in c {
                    acc += w * wigner_from_state(psi, z, &self.params)?;
                }
                Ok(acc)
            }
            Source::Gaussian(g) => Ok(g.value(z, 0.0)),
            Source::Evolved { base, back } => {
                let v = back * nalgebra::Vector4::from(z.to_array());
                base.value(PhasePoint::new(v[0], v[1], v[2], v[3]))
            }
        }
    }

    fn grid(&self) -> Option<Grid2> {
        match &self.source {
            Source::Pure(psi) => Some(psi.grid),
            Source::Mixed(c) => Some(c[0].1.grid),
            Source::Gaussian(_) => None,
            Source::Evolved { base, .. } => base.grid(),
        }
    }

    /// The integration lattice of this evaluator.
    pub fn lattice(&self) -> Result<Lattice> {
        if let Source::Evolved { base, .. } = &self.source {
            if base.is_grid_based() {
                return Err(Error::Unsupported(
                    "lattice integrals of evolved grid states; evaluate pointwise instead".into(),
                ));
            }
        }
        let grid = match self.grid() {
            Some(g) => g,
            None => state_grid(&self.params, &self.settings)?,
        };
        let stride = if self.is_grid_based() {
            self.settings.outer_stride
        } else {
            self.settings.outer_stride.max(ANALYTIC_STRIDE)
        };
        Ok(Lattice::new(grid, stride, self.params.theta, self.params.hbar))
    }

    /// Values on the `(p_x, s)` plane at outer node `(a, b)`, indexed
    /// `m * lat.my + n` in FFT order, with the largest discarded imaginary
    /// part; `None` when the whole plane is below 1e−18.
    fn slab(&self, lat: &Lattice, ffts: &SlabFft, a: usize, b: usize) -> Option<(Vec<f64>, f64)> {
        match &self.source {
            Source::Pure(psi) => pure_slab(psi, lat, ffts, a, b),
            Source::Mixed(c) => {
                let mut acc: Option<(Vec<f64>, f64)> = None;
                for (w, psi) in c {
                    if let Some((v, i)) = pure_slab(psi, lat, ffts, a, b) {
                        let (sum, im) = acc.get_or_insert_with(|| (vec![0.0; lat.mx * lat.my], 0.0));
                        for (x, y) in sum.iter_mut().zip(v) {
                            *x += w * y;
                        }
                        *im = im.max(i);
                    }
                }
                acc
            }
            _ => {
                if let Source::Gaussian(g) = &self.source {
                    let x = lat.grid.a.value(a) - g.center.x;
                    let py = lat.grid.b.value(b) - g.center.py;
                    let u = x + 0.5 * g.theta * py;
                    let peak = g.value(g.center, 0.0)
                        * (-py * py / (g.m * g.hbar * g.varpi) - g.m * g.varpi / g.hbar * u * u).exp();
                    let reach = (lat.mx * lat.my) as f64 * lat.inner_cell() * lat.outer_cell();
                    if peak * reach < SLAB_CUTOFF {
                        return None;
                    }
                }
                let mut out = vec![0.0; lat.mx * lat.my];
                for m in 0..lat.mx {
                    for n in 0..lat.my {
                        // analytic sources never fail pointwise once constructed
                        out[m * lat.my + n] = self.value(lat.point(a, b, m, n)).unwrap_or(f64::NAN);
                    }
                }
                Some((out, 0.0))
            }
        }
    }
}

fn flow_map<S: Scalar>(kind: FlowKind, z: [S; 4], t: S, p: &NCParams) -> Result<[S; 4]> {
    match kind {
        FlowKind::Free => Ok(free_flow(z, t, p.m)),
        FlowKind::Oscillator => Ok(OscillatorClosedForm::new(p)?.flow(z, t)),
        FlowKind::General => Err(Error::Unsupported(
            "Liouville evolution by characteristics needs a quadratic Hamiltonian (free or oscillator)".into(),
        )),
    }
}

/// Jacobian of the classical flow `Φ_t` at `z`, by dual numbers.
pub fn flow_jacobian(kind: FlowKind, z: PhasePoint, t: f64, p: &NCParams) -> Result<Matrix4<f64>> {
    let z = z.to_array();
    let mut jac = Matrix4::zeros();
    for col in 0..4 {
        let seeded: [Dual<f64>; 4] = std::array::from_fn(|i| Dual::new(z[i], if i == col { 1.0 } else { 0.0 }));
        let out = flow_map(kind, seeded, Dual::constant(t), p)?;
        for row in 0..4 {
            jac[(row, col)] = out[row].eps;
        }
    }
    Ok(jac)
}

/// `W(z, t) = W₀(Φ₋ₜ(z))` for free or oscillator dynamics.
pub fn evolve_liouville(w0: &WignerEvaluator, t: f64, flow: FlowKind) -> Result<WignerEvaluator> {
    let p = w0.params;
    // both closed-form flows are linear in z
    let back = flow_jacobian(flow, PhasePoint::ORIGIN, -t, &p)?;
    Ok(WignerEvaluator {
        source: Source::Evolved {
            base: Box::new(w0.clone()),
            back,
        },
        params: p,
        settings: w0.settings,
    })
}

/// Diagnostics of one pointwise quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerSample {
    pub value: f64,
    pub imag_residue: f64,
    /// True when `(2x, 2p_y)` fell between lattice nodes and the mirrored
    /// factor was interpolated.
    pub interpolated: bool,
}

/// Trapezoid quadrature of the pure-state transform at one point.
///
/// `ζ, η` are chosen so that `x − ζ` and `p_y − η` run over the grid nodes;
/// the mirrored factor `ψ*(2x − u, 2p_y − v)` is exact on the half lattice and
/// bilinearly interpolated elsewhere.
pub fn wigner_sample(psi: &GridFunction, z: PhasePoint, p: &NCParams) -> Result<WignerSample> {
    if psi.basis != Basis::XPy {
        return domain("pointwise Wigner quadrature needs an (x, p_y) state");
    }
    let g = psi.grid;
    let hb = p.hbar;
    let ua = (2.0 * z.x - 2.0 * g.a.start) / g.a.step;
    let ub = (2.0 * z.py - 2.0 * g.b.start) / g.b.step;
    let on_lattice = (ua - ua.round()).abs() < 1e-9 && (ub - ub.round()).abs() < 1e-9;
    let s = z.y - p.theta * z.px;
    let phase_a: Vec<Complex64> = (0..g.a.len)
        .map(|i| Complex64::from_polar(g.a.weight(i), 2.0 * (z.x - g.a.value(i)) * z.px / hb))
        .collect();
    let phase_b: Vec<Complex64> = (0..g.b.len)
        .map(|j| Complex64::from_polar(g.b.weight(j), -2.0 * (z.py - g.b.value(j)) * s / hb))
        .collect();
    let (ra, rb) = (ua.round() as isize, ub.round() as isize);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..g.a.len {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..g.b.len {
            let v = psi.at(i, j);
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let partner = if on_lattice {
                psi.at_or_zero(ra - i as isize, rb - j as isize)
            } else {
                psi.interpolate(2.0 * z.x - g.a.value(i), 2.0 * z.py - g.b.value(j))
            };
            row += v * partner.conj() * phase_b[j];
        }
        acc += row * phase_a[i];
    }
    acc /= PI * PI * hb * hb;
    Ok(WignerSample {
        value: acc.re,
        imag_residue: acc.im.abs(),
        interpolated: !on_lattice,
    })
}

/// `W(z)` of a normalized `(x, p_y)` state; realness is checked to
/// [`REALNESS_TOLERANCE`] whenever the quadrature is exact.
pub fn wigner_from_state(psi: &GridFunction, z: PhasePoint, p: &NCParams) -> Result<f64> {
    let s = wigner_sample(psi, z, p)?;
    if !s.interpolated && s.imag_residue > REALNESS_TOLERANCE {
        return Err(Error::Accuracy(format!("Wigner value at {z} has imaginary residue {:.2e}", s.imag_residue)));
    }
    Ok(s.value)
}

/// Outer `(x, p_y)` nodes and inner `(p_x, s)` FFT planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub grid: Grid2,
    pub stride: usize,
    offset_a: usize,
    offset_b: usize,
    pub mx: usize,
    pub my: usize,
    pub dpx: f64,
    pub ds: f64,
    pub theta: f64,
    scale: f64,
}

/// Smallest `2^a 3^b 5^c ≥ n`.
fn fft_len(n: usize) -> usize {
    let smooth = |mut m: usize| {
        for f in [2, 3, 5] {
            while m % f == 0 {
                m /= f;
            }
        }
        m == 1
    };
    (n.max(1)..).find(|&m| smooth(m)).unwrap()
}

fn signed(k: usize, m: usize) -> isize {
    if k < m.div_ceil(2) {
        k as isize
    } else {
        k as isize - m as isize
    }
}

impl Lattice {
    pub fn new(grid: Grid2, stride: usize, theta: f64, hbar: f64) -> Self {
        let stride = stride.max(1);
        let center = |ax: &Axis| ((-ax.start / ax.step).round().clamp(0.0, (ax.len - 1) as f64) as usize) % stride;
        let (mx, my) = (fft_len(grid.a.len), fft_len(grid.b.len));
        Self {
            grid,
            stride,
            offset_a: center(&grid.a),
            offset_b: center(&grid.b),
            mx,
            my,
            dpx: PI * hbar / (mx as f64 * grid.a.step),
            ds: PI * hbar / (my as f64 * grid.b.step),
            theta,
            scale: grid.a.step * grid.b.step / (PI * PI * hbar * hbar),
        }
    }

    pub fn outer_nodes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in (self.offset_a..self.grid.a.len).step_by(self.stride) {
            for b in (self.offset_b..self.grid.b.len).step_by(self.stride) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn px(&self, m: usize) -> f64 {
        signed(m, self.mx) as f64 * self.dpx
    }

    pub fn s(&self, n: usize) -> f64 {
        signed(n, self.my) as f64 * self.ds
    }

    pub fn point(&self, a: usize, b: usize, m: usize, n: usize) -> PhasePoint {
        let px = self.px(m);
        PhasePoint::new(self.grid.a.value(a), self.s(n) + self.theta * px, px, self.grid.b.value(b))
    }

    pub fn outer_cell(&self) -> f64 {
        self.stride as f64 * self.grid.a.step * self.stride as f64 * self.grid.b.step
    }

    pub fn inner_cell(&self) -> f64 {
        self.dpx * self.ds
    }

    /// FFT indices in ascending coordinate order.
    fn sorted(m: usize) -> Vec<usize> {
        let h = m.div_ceil(2);
        (h..m).chain(0..h).collect()
    }
}

struct SlabFft {
    fwd_l: Arc<dyn Fft<f64>>,
    inv_k: Arc<dyn Fft<f64>>,
}

impl SlabFft {
    fn new(lat: &Lattice) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fwd_l: planner.plan_fft_forward(lat.my),
            inv_k: planner.plan_fft_inverse(lat.mx),
        }
    }
}

/// Slabs whose bound `scale·Σ|C|` on `max |W|` is below this are skipped.
const SLAB_CUTOFF: f64 = 1e-18;

fn pure_slab(psi: &GridFunction, lat: &Lattice, ffts: &SlabFft, a: usize, b: usize) -> Option<(Vec<f64>, f64)> {
    let (mx, my) = (lat.mx, lat.my);
    let (na, nb) = (psi.grid.a.len, psi.grid.b.len);
    let ka = a.min(na - 1 - a) as isize;
    let lb = b.min(nb - 1 - b) as isize;
    let mut c = vec![Complex64::new(0.0, 0.0); mx * my];
    let mut bound = 0.0;
    for k in -ka..=ka {
        let row = k.rem_euclid(mx as isize) as usize * my;
        for l in -lb..=lb {
            let lo = psi.at((a as isize - k) as usize, (b as isize - l) as usize);
            let hi = psi.at((a as isize + k) as usize, (b as isize + l) as usize);
            let v = lo * hi.conj();
            bound += v.norm();
            c[row + l.rem_euclid(my as isize) as usize] = v;
        }
    }
    if bound * lat.scale < SLAB_CUTOFF {
        return None;
    }
    // forward along l for every k, then inverse along k
    ffts.fwd_l.process(&mut c);
    let mut t = vec![Complex64::new(0.0, 0.0); mx * my];
    for k in 0..mx {
        for n in 0..my {
            t[n * mx + k] = c[k * my + n];
        }
    }
    ffts.inv_k.process(&mut t);
    let mut out = vec![0.0; mx * my];
    let mut im = 0.0f64;
    for n in 0..my {
        for m in 0..mx {
            let v = t[n * mx + m] * lat.scale;
            out[m * my + n] = v.re;
            im = im.max(v.im.abs());
        }
    }
    Some((out, im))
}

fn realness(im: f64) -> Result<()> {
    if im > REALNESS_TOLERANCE {
        return Err(Error::Accuracy(format!("Wigner lattice values carry imaginary residue {im:.2e}")));
    }
    Ok(())
}

/// Lattice sum `Σ f(z, W(z))` times the phase-space cell.
fn lattice_integral(w: &WignerEvaluator, f: impl Fn(PhasePoint, f64) -> f64 + Sync) -> Result<f64> {
    let lat = w.lattice()?;
    let ffts = SlabFft::new(&lat);
    let (sum, im) = lat
        .outer_nodes()
        .par_iter()
        .filter_map(|&(a, b)| {
            let (slab, im) = w.slab(&lat, &ffts, a, b)?;
            let mut s = 0.0;
            for m in 0..lat.mx {
                for n in 0..lat.my {
                    let v = slab[m * lat.my + n];
                    if v != 0.0 {
                        s += f(lat.point(a, b, m, n), v);
                    }
                }
            }
            Some((s, im))
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1.max(y.1)));
    realness(im)?;
    if !sum.is_finite() {
        return Err(Error::Evaluation { field: "wigner".into() });
    }
    Ok(sum * lat.outer_cell() * lat.inner_cell())
}

/// `∫ W d⁴z`.
pub fn normalization(w: &WignerEvaluator) -> Result<f64> {
    lattice_integral(w, |_, v| v)
}

/// `∫ W(z) a(z) d⁴z`, with `a` the phase-space symbol of the observable.
///
/// `a = 1` gives the normalization; for the oscillator ground state the
/// classical Hamiltonian gives `E₀,₀`.
pub fn expectation(a: impl Fn(PhasePoint) -> f64 + Sync, w: &WignerEvaluator) -> Result<f64> {
    lattice_integral(w, |z, v| v * a(z))
}

/// `(2πħ)² ∫ W₁W₂ d⁴z`, clipped to `[0, 1 + 1e−6]`.
pub fn overlap(w1: &WignerEvaluator, w2: &WignerEvaluator) -> Result<f64> {
    let hb = w1.params.hbar;
    // integrate on the lattice of whichever side is grid based
    let (lat_owner, other) = if w1.is_grid_based() || !w2.is_grid_based() { (w1, w2) } else { (w2, w1) };
    let lat = lat_owner.lattice()?;
    if other.is_grid_based() {
        let g = other.grid().unwrap();
        if !g.a.same_as(&lat.grid.a) || !g.b.same_as(&lat.grid.b) {
            return domain("overlap of grid states needs a common grid");
        }
    }
    let ffts = SlabFft::new(&lat);
    let (sum, im) = lat
        .outer_nodes()
        .par_iter()
        .filter_map(|&(a, b)| {
            let (s1, i1) = lat_owner.slab(&lat, &ffts, a, b)?;
            let (s2, i2) = other.slab(&lat, &ffts, a, b)?;
            Some((s1.iter().zip(&s2).map(|(x, y)| x * y).sum::<f64>(), i1.max(i2)))
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1.max(y.1)));
    realness(im)?;
    let v = (2.0 * PI * hb).powi(2) * sum * lat.outer_cell() * lat.inner_cell();
    Ok(v.clamp(0.0, 1.0 + 1e-6))
}

/// A reduced density on two of the four coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    /// The representation whose probability density this is.
    pub kept: Basis,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// `c1`-major.
    pub values: Vec<f64>,
    pub cell: f64,
    /// For `(y, p_x)`: `c1` holds `s` and `y = s + shear·p_x`.
    pub shear: f64,
}

impl Marginal {
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell
    }

    /// Point `(i, j)` in the coordinates of `kept`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        match self.kept {
            Basis::YPx => (self.c1[i] + self.shear * self.c2[j], self.c2[j]),
            _ => (self.c1[i], self.c2[j]),
        }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.c2.len() + j]
    }
}

/// Integrates `W` over the pair complementary to `kept`.
///
/// `(x, p_y)` lives on the outer nodes, `(p_x, p_y)` on FFT `p_x` × outer
/// `p_y`, and `(y, p_x)` on the sheared FFT plane `(s, p_x)`.
pub fn marginal(w: &WignerEvaluator, kept: Basis) -> Result<Marginal> {
    let lat = w.lattice()?;
    let ffts = SlabFft::new(&lat);
    let nodes = lat.outer_nodes();
    let a_nodes: Vec<usize> = {
        let mut v: Vec<usize> = nodes.iter().map(|n| n.0).collect();
        v.dedup();
        v
    };
    let b_nodes: Vec<usize> = nodes.iter().take_while(|n| n.0 == nodes[0].0).map(|n| n.1).collect();
    let sm = Lattice::sorted(lat.mx);
    let sn = Lattice::sorted(lat.my);
    let slabs: Vec<(usize, usize, Vec<f64>, f64)> = nodes
        .par_iter()
        .filter_map(|&(a, b)| {
            let (s, im) = w.slab(&lat, &ffts, a, b)?;
            Some((a, b, s, im))
        })
        .collect();
    realness(slabs.iter().map(|s| s.3).fold(0.0, f64::max))?;
    let idx_a = |a: usize| a_nodes.iter().position(|&x| x == a).unwrap();
    let idx_b = |b: usize| b_nodes.iter().position(|&x| x == b).unwrap();
    let outer_a = lat.stride as f64 * lat.grid.a.step;
    let outer_b = lat.stride as f64 * lat.grid.b.step;
    let out = match kept {
        Basis::XPy => {
            let mut values = vec![0.0; a_nodes.len() * b_nodes.len()];
            for (a, b, s, _) in &slabs {
                values[idx_a(*a) * b_nodes.len() + idx_b(*b)] = s.iter().sum::<f64>() * lat.inner_cell();
            }
            Marginal {
                kept,
                c1: a_nodes.iter().map(|&a| lat.grid.a.value(a)).collect(),
                c2: b_nodes.iter().map(|&b| lat.grid.b.value(b)).collect(),
                values,
                cell: outer_a * outer_b,
                shear: 0.0,
            }
        }
        Basis::Momentum => {
            let mut values = vec![0.0; lat.mx * b_nodes.len()];
            for (_, b, s, _) in &slabs {
                let jb = idx_b(*b);
                for (i, &m) in sm.iter().enumerate() {
                    let row: f64 = s[m * lat.my..(m + 1) * lat.my].iter().sum();
                    values[i * b_nodes.len() + jb] += row * lat.ds * outer_a;
                }
            }
            Marginal {
                kept,
                c1: sm.iter().map(|&m| lat.px(m)).collect(),
                c2: b_nodes.iter().map(|&b| lat.grid.b.value(b)).collect(),
                values,
                cell: lat.dpx * outer_b,
                shear: 0.0,
            }
        }
        Basis::YPx => {
            let mut values = vec![0.0; lat.my * lat.mx];
            for (_, _, s, _) in &slabs {
                for (i, &n) in sn.iter().enumerate() {
                    for (j, &m) in sm.iter().enumerate() {
                        values[i * lat.mx + j] += s[m * lat.my + n] * outer_a * outer_b;
                    }
                }
            }
            Marginal {
                kept,
                c1: sn.iter().map(|&n| lat.s(n)).collect(),
                c2: sm.iter().map(|&m| lat.px(m)).collect(),
                values,
                cell: lat.ds * lat.dpx,
                shear: lat.theta,
            }
        }
    };
    Ok(out)
}

/// Most negative lattice value of `W`, with its location and the peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityWitness {
    pub point: PhasePoint,
    pub min: f64,
    pub max: f64,
    /// `min < −1e−6 · max`.
    pub found: bool,
}

pub fn negativity_witness(w: &WignerEvaluator) -> Result<NegativityWitness> {
    let lat = w.lattice()?;
    let ffts = SlabFft::new(&lat);
    let (min, at, max, im) = lat
        .outer_nodes()
        .par_iter()
        .filter_map(|&(a, b)| {
            let (s, im) = w.slab(&lat, &ffts, a, b)?;
            let (mut lo, mut at, mut hi) = (f64::INFINITY, (a, b, 0, 0), f64::NEG_INFINITY);
            for m in 0..lat.mx {
                for n in 0..lat.my {
                    let v = s[m * lat.my + n];
                    if v < lo {
                        lo = v;
                        at = (a, b, m, n);
                    }
                    hi = hi.max(v);
                }
            }
            Some((lo, at, hi, im))
        })
        .reduce(
            || (f64::INFINITY, (0, 0, 0, 0), f64::NEG_INFINITY, 0.0),
            |x, y| {
                let (lo, at) = if y.0 < x.0 { (y.0, y.1) } else { (x.0, x.1) };
                (lo, at, x.2.max(y.2), x.3.max(y.3))
            },
        );
    realness(im)?;
    Ok(NegativityWitness {
        point: lat.point(at.0, at.1, at.2, at.3),
        min,
        max,
        found: min < -1e-6 * max,
    })
}

/// Two coordinates varied over ranges, the other two held at `fixed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub vary: (Coord, Coord),
    pub fixed: PhasePoint,
    pub range1: (f64, f64),
    pub range2: (f64, f64),
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub spec: SliceSpec,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// `c1`-major.
    pub values: Vec<f64>,
}

fn with_coord(mut z: PhasePoint, c: Coord, v: f64) -> PhasePoint {
    match c {
        Coord::X => z.x = v,
        Coord::Y => z.y = v,
        Coord::Px => z.px = v,
        Coord::Py => z.py = v,
    }
    z
}

pub fn slice(w: &WignerEvaluator, spec: SliceSpec) -> Result<Slice> {
    if spec.vary.0 == spec.vary.1 {
        return domain("a slice needs two different coordinates");
    }
    if spec.n1 < 1 || spec.n2 < 1 {
        return domain("a slice needs at least one node per axis");
    }
    let c1 = crate::thermo::linspace(spec.range1.0, spec.range1.1, spec.n1);
    let c2 = crate::thermo::linspace(spec.range2.0, spec.range2.1, spec.n2);
    let values = (0..c1.len() * c2.len())
        .into_par_iter()
        .map(|k| {
            let z = with_coord(with_coord(spec.fixed, spec.vary.0, c1[k / c2.len()]), spec.vary.1, c2[k % c2.len()]);
            w.value(z)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Slice { spec, c1, c2, values })
}

impl Slice {
    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        with_coord(with_coord(self.spec.fixed, self.spec.vary.0, self.c1[i]), self.spec.vary.1, self.c2[j])
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV `c1,c2,W` with coordinate names as headers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{},{},W", self.spec.vary.0.label(), self.spec.vary.1.label())?;
        for (i, a) in self.c1.iter().enumerate() {
            for (j, b) in self.c2.iter().enumerate() {
                writeln!(out, "{a:.16e},{b:.16e},{:.16e}", self.values[i * self.c2.len() + j])?;
            }
        }
        Ok(())
    }

    /// Gnuplot script for a heat map of the slice CSV.
    pub fn plot_script(&self, csv_name: &str) -> String {
        let (l1, l2) = (self.spec.vary.0.label(), self.spec.vary.1.label());
        format!(
            "set datafile separator ','\n\
             set xlabel '{l1}'\nset ylabel '{l2}'\nset cblabel 'W'\n\
             set view map\nset palette defined (-1 'blue', 0 'white', 1 'red')\n\
             set dgrid3d {n2},{n1}\n\
             splot '{csv_name}' every ::1 using 1:2:3 with pm3d notitle\n\
             pause mouse close\n",
            n1 = self.c1.len(),
            n2 = self.c2.len(),
        )
    }
}
