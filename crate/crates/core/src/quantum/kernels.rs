//! Basis-change kernels between the `(p_x, p_y)`, `(x, p_y)` and `(y, p_x)`
//! representations, in the flat gauge:
//!
//! - `⟨x,p_y|y,p_x⟩ = e^{i(xp_x − p_y y + θp_y p_x)/ħ} / 2πħ`
//! - `⟨x,p_y|p'⟩ = δ(p_y − p'_y) e^{i(xp'_x + θp'_y p'_x/2)/ħ} / sqrt(2πħ)`
//! - `⟨y,p_x|p'⟩ = δ(p_x − p'_x) e^{i(yp'_y − θp'_y p'_x/2)/ħ} / sqrt(2πħ)`
//!
//! and their conjugates for the reverse directions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{Axis, Basis, Grid2, GridFunction};
use crate::error::{Error, Result};
use crate::params::NCParams;

/// Representation data of the NC Heisenberg algebra. Only the flat,
/// simply connected choice (unit measures, no holonomy) is supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeChoice {
    /// Measure functions `(g, h, γ)`.
    pub measures: [f64; 3],
    /// Holonomy phases of `Ω` and `Ξ`, in radians.
    pub holonomies: [f64; 2],
}

impl GaugeChoice {
    pub const FLAT: GaugeChoice = GaugeChoice {
        measures: [1.0, 1.0, 1.0],
        holonomies: [0.0, 0.0],
    };

    pub fn is_flat(&self) -> bool {
        *self == Self::FLAT
    }

    fn require_flat(&self) -> Result<()> {
        if self.is_flat() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "only the flat simply connected gauge is implemented, got {self:?}"
            )))
        }
    }
}

impl Default for GaugeChoice {
    fn default() -> Self {
        Self::FLAT
    }
}

/// Kernel value; `delta` names the coordinate whose Dirac delta multiplies
/// `value` for the momentum-basis kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub delta: Option<&'static str>,
}

/// `⟨to|from⟩` with both points given in their own basis coordinate order.
pub fn basis_kernel(from: Basis, to: Basis, from_pt: (f64, f64), to_pt: (f64, f64), p: &NCParams, gauge: &GaugeChoice) -> Result<KernelValue> {
    gauge.require_flat()?;
    let (hb, th) = (p.hbar, p.theta);
    let full = 1.0 / (2.0 * PI * hb);
    let half = full.sqrt();
    let phase = |norm: f64, arg: f64| Complex64::from_polar(norm, arg / hb);
    let kv = |value, delta| Ok(KernelValue { value, delta });
    match (to, from) {
        (a, b) if a == b => Err(Error::Domain("a basis kernel needs two different bases".into())),
        (Basis::XPy, Basis::YPx) => {
            let ((x, py), (y, px)) = (to_pt, from_pt);
            kv(phase(full, x * px - py * y + th * py * px), None)
        }
        (Basis::YPx, Basis::XPy) => {
            let ((y, px), (x, py)) = (to_pt, from_pt);
            kv(phase(full, x * px - py * y + th * py * px).conj(), None)
        }
        (Basis::XPy, Basis::Momentum) => {
            let ((x, _), (px, py)) = (to_pt, from_pt);
            kv(phase(half, x * px + 0.5 * th * py * px), Some("py"))
        }
        (Basis::Momentum, Basis::XPy) => {
            let ((px, py), (x, _)) = (to_pt, from_pt);
            kv(phase(half, x * px + 0.5 * th * py * px).conj(), Some("py"))
        }
        (Basis::YPx, Basis::Momentum) => {
            let ((y, _), (px, py)) = (to_pt, from_pt);
            kv(phase(half, y * py - 0.5 * th * py * px), Some("px"))
        }
        (Basis::Momentum, Basis::YPx) => {
            let ((px, py), (y, _)) = (to_pt, from_pt);
            kv(phase(half, y * py - 0.5 * th * py * px).conj(), Some("px"))
        }
        _ => unreachable!(),
    }
}

/// Row-major complex matrix.
#[derive(Debug, Clone)]
struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Mat {
    fn transpose(&self) -> Mat {
        let mut data = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Multiplies entry `(r, c)` by `f(r, c)`.
    fn modulate(&mut self, f: impl Fn(usize, usize) -> Complex64) {
        for r in 0..self.rows {
            for c in 0..self.cols {
                self.data[r * self.cols + c] *= f(r, c);
            }
        }
    }
}

/// `out[r, u] = Σ_v w_v e^{i·sign·u·v/ħ} m[r, v]` along the column index.
fn dft_cols(m: &Mat, src: &Axis, dst: &Axis, sign: f64, hbar: f64) -> Mat {
    let kernel: Vec<Complex64> = (0..dst.len)
        .flat_map(|u| {
            let uu = dst.value(u);
            (0..src.len).map(move |v| Complex64::from_polar(src.weight(v), sign * uu * src.value(v) / hbar))
        })
        .collect();
    let data: Vec<Complex64> = (0..m.rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            let row = &m.data[r * m.cols..(r + 1) * m.cols];
            let kernel = &kernel;
            (0..dst.len).map(move |u| {
                let k = &kernel[u * src.len..(u + 1) * src.len];
                k.iter().zip(row).map(|(a, b)| a * b).sum::<Complex64>()
            })
        })
        .collect();
    Mat {
        rows: m.rows,
        cols: dst.len,
        data,
    }
}

fn alias_check(what: &str, src: &Axis, max_conjugate: f64, hbar: f64) -> Result<()> {
    let limit = PI * hbar / max_conjugate.max(f64::MIN_POSITIVE);
    if src.step > limit * (1.0 + 1e-12) {
        return Err(Error::Aliasing(format!(
            "{what}: spacing {:.4e} exceeds the Nyquist limit {limit:.4e} (max conjugate coordinate {max_conjugate:.4e})",
            src.step
        )));
    }
    Ok(())
}

fn require_axis(shared: &Axis, given: &Axis, name: &str) -> Result<()> {
    if shared.same_as(given) {
        Ok(())
    } else {
        Err(Error::Domain(format!("target grid must keep the source {name} axis unchanged")))
    }
}

/// Target grid that reuses, for each new coordinate, the axis of its
/// canonical conjugate (`x ↔ p_x`, `y ↔ p_y`) and keeps shared axes.
pub fn conjugate_grid(psi: &GridFunction, target: Basis) -> Grid2 {
    let (a, b) = (psi.grid.a, psi.grid.b);
    match (psi.basis, target) {
        (s, t) if s == t => psi.grid,
        // (px, py) -> (x, py) / (y, px)
        (Basis::Momentum, Basis::XPy) => Grid2::new(a, b),
        (Basis::Momentum, Basis::YPx) => Grid2::new(b, a),
        // (x, py) -> (px, py) / (y, px)
        (Basis::XPy, Basis::Momentum) => Grid2::new(a, b),
        (Basis::XPy, Basis::YPx) => Grid2::new(b, a),
        // (y, px) -> (px, py) / (x, py)
        (Basis::YPx, Basis::Momentum) => Grid2::new(b, a),
        (Basis::YPx, Basis::XPy) => Grid2::new(b, a),
        _ => unreachable!(),
    }
}

/// Change of representation by trapezoid quadrature of the kernel
/// integrals. The two-dimensional `(x,p_y) ↔ (y,p_x)` case is factorized
/// into two one-dimensional sums around a pointwise `θ` phase.
pub fn transform(psi: &GridFunction, target: Basis, grid: Grid2, p: &NCParams) -> Result<GridFunction> {
    p.validate()?;
    let (hb, th) = (p.hbar, p.theta);
    let (sa, sb) = (psi.grid.a, psi.grid.b);
    let (ta, tb) = (grid.a, grid.b);
    let m = Mat {
        rows: sa.len,
        cols: sb.len,
        data: psi.values.clone(),
    };
    let half = 1.0 / (2.0 * PI * hb).sqrt();
    let full = 1.0 / (2.0 * PI * hb);
    let out: Mat = match (psi.basis, target) {
        (s, t) if s == t => return Ok(psi.clone()),
        (Basis::Momentum, Basis::XPy) => {
            // source (px, py) -> target (x, py)
            require_axis(&sb, &tb, "py")?;
            alias_check("px integral", &sa, ta.max_abs() + 0.5 * th.abs() * sb.max_abs(), hb)?;
            let mut t = m.transpose(); // (py, px)
            t.modulate(|r, c| Complex64::from_polar(half, 0.5 * th * sb.value(r) * sa.value(c) / hb));
            dft_cols(&t, &sa, &ta, 1.0, hb).transpose()
        }
        (Basis::XPy, Basis::Momentum) => {
            // (x, py) -> (px, py)
            require_axis(&sb, &tb, "py")?;
            alias_check("x integral", &sa, ta.max_abs(), hb)?;
            let mut t = dft_cols(&m.transpose(), &sa, &ta, -1.0, hb); // (py, px)
            t.modulate(|r, c| Complex64::from_polar(half, -0.5 * th * sb.value(r) * ta.value(c) / hb));
            t.transpose()
        }
        (Basis::Momentum, Basis::YPx) => {
            // (px, py) -> (y, px)
            require_axis(&sa, &tb, "px")?;
            alias_check("py integral", &sb, ta.max_abs() + 0.5 * th.abs() * sa.max_abs(), hb)?;
            let mut t = m; // (px, py)
            t.modulate(|r, c| Complex64::from_polar(half, -0.5 * th * sb.value(c) * sa.value(r) / hb));
            dft_cols(&t, &sb, &ta, 1.0, hb).transpose()
        }
        (Basis::YPx, Basis::Momentum) => {
            // (y, px) -> (px, py)
            require_axis(&sb, &ta, "px")?;
            alias_check("y integral", &sa, tb.max_abs(), hb)?;
            let mut t = dft_cols(&m.transpose(), &sa, &tb, -1.0, hb); // (px, py)
            t.modulate(|r, c| Complex64::from_polar(half, 0.5 * th * tb.value(c) * sb.value(r) / hb));
            t
        }
        (Basis::XPy, Basis::YPx) => {
            // (x, py) -> (y, px): ∫dx e^{−ixpx/ħ}, phase e^{−iθ py px/ħ}, ∫dpy e^{i py y/ħ}
            alias_check("x integral", &sa, tb.max_abs(), hb)?;
            alias_check("py integral", &sb, ta.max_abs() + th.abs() * tb.max_abs(), hb)?;
            let mut t = dft_cols(&m.transpose(), &sa, &tb, -1.0, hb).transpose(); // (px, py)
            t.modulate(|r, c| Complex64::from_polar(full, -th * sb.value(c) * tb.value(r) / hb));
            dft_cols(&t, &sb, &ta, 1.0, hb).transpose()
        }
        (Basis::YPx, Basis::XPy) => {
            // (y, px) -> (x, py): ∫dy e^{−i py y/ħ}, phase e^{iθ py px/ħ}, ∫dpx e^{i x px/ħ}
            alias_check("y integral", &sa, tb.max_abs(), hb)?;
            alias_check("px integral", &sb, ta.max_abs() + th.abs() * tb.max_abs(), hb)?;
            let mut t = dft_cols(&m.transpose(), &sa, &tb, -1.0, hb).transpose(); // (py, px)
            t.modulate(|r, c| Complex64::from_polar(full, th * tb.value(r) * sb.value(c) / hb));
            dft_cols(&t, &sb, &ta, 1.0, hb).transpose()
        }
        _ => unreachable!(),
    };
    GridFunction::new(target, grid, out.data)
}

/// `transform` onto [`conjugate_grid`].
pub fn transform_conjugate(psi: &GridFunction, target: Basis, p: &NCParams) -> Result<GridFunction> {
    transform(psi, target, conjugate_grid(psi, target), p)
}

/// One value of the transformed state at `(c1, c2)` in the target basis.
///
/// For the momentum kernels the delta-function coordinate is interpolated
/// linearly between neighbouring source rows.
pub fn transform_at(psi: &GridFunction, target: Basis, pt: (f64, f64), p: &NCParams) -> Result<Complex64> {
    let gauge = GaugeChoice::FLAT;
    let g = psi.grid;
    if psi.basis == target {
        return Ok(psi.interpolate(pt.0, pt.1));
    }
    let one_d = |shared_on_a: bool, shared: f64| -> Result<Complex64> {
        let (sh_axis, int_axis) = if shared_on_a { (g.a, g.b) } else { (g.b, g.a) };
        let u = (shared - sh_axis.start) / sh_axis.step;
        if u < 0.0 || u > (sh_axis.len - 1) as f64 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let i0 = (u.floor() as usize).min(sh_axis.len - 2);
        let f = u - i0 as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (row, wgt) in [(i0, 1.0 - f), (i0 + 1, f)] {
            if wgt == 0.0 {
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..int_axis.len {
                let (i, j) = if shared_on_a { (row, k) } else { (k, row) };
                let src = g.point(i, j);
                let kv = basis_kernel(psi.basis, target, src, pt, p, &gauge)?;
                s += kv.value * psi.at(i, j) * int_axis.weight(k);
            }
            acc += s * wgt;
        }
        Ok(acc)
    };
    match (psi.basis, target) {
        // shared py: source axis b, target coordinate 2
        (Basis::Momentum, Basis::XPy) | (Basis::XPy, Basis::Momentum) => one_d(false, pt.1),
        // shared px: source (px, py) axis a / source (y, px) axis b
        (Basis::Momentum, Basis::YPx) => one_d(true, pt.1),
        (Basis::YPx, Basis::Momentum) => one_d(false, pt.0),
        _ => {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..g.a.len {
                let mut row = Complex64::new(0.0, 0.0);
                for j in 0..g.b.len {
                    let kv = basis_kernel(psi.basis, target, g.point(i, j), pt, p, &gauge)?;
                    row += kv.value * psi.at(i, j) * g.b.weight(j);
                }
                acc += row * g.a.weight(i);
            }
            Ok(acc)
        }
    }
}
