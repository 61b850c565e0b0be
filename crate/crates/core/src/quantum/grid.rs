use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Which pair of commuting coordinates labels a wave function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// `ψ(p_x, p_y)`
    Momentum,
    /// `ψ(x, p_y)`
    XPy,
    /// `ψ(y, p_x)`
    YPx,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Momentum, Basis::XPy, Basis::YPx];

    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            Basis::Momentum => ("px", "py"),
            Basis::XPy => ("x", "py"),
            Basis::YPx => ("y", "px"),
        }
    }

    pub fn parse(s: &str) -> Option<Basis> {
        match s.to_ascii_lowercase().replace(['(', ')', ',', '_', '-', ' '], "").as_str() {
            "momentum" | "p" | "pxpy" => Some(Basis::Momentum),
            "xpy" => Some(Basis::XPy),
            "ypx" => Some(Basis::YPx),
            _ => None,
        }
    }
}

/// Uniform axis `start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if len < 2 || !(step > 0.0) || !start.is_finite() || !step.is_finite() {
            return domain(format!("axis needs len >= 2 and a positive step, got len {len}, step {step}"));
        }
        Ok(Self { start, step, len })
    }

    /// `len` nodes spanning `[−half_width, half_width]` inclusive.
    pub fn symmetric(half_width: f64, len: usize) -> Result<Self> {
        if !(half_width > 0.0) || len < 2 {
            return domain("symmetric axis needs a positive half width and at least two nodes");
        }
        Self::new(-half_width, 2.0 * half_width / (len - 1) as f64, len)
    }

    /// Validates uniform spacing to relative 1e−12.
    pub fn from_values(v: &[f64]) -> Result<Self> {
        if v.len() < 2 {
            return domain("axis needs at least two values");
        }
        let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        for (i, x) in v.iter().enumerate() {
            if (x - (v[0] + i as f64 * step)).abs() > 1e-12 * step.abs().max(v[0].abs()) {
                return domain("axis values are not uniformly spaced");
            }
        }
        Self::new(v[0], step, v.len())
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.value(self.len - 1)
    }

    pub fn max_abs(&self) -> f64 {
        self.start.abs().max(self.end().abs())
    }

    /// Smallest distance from the origin to an endpoint.
    pub fn min_edge(&self) -> f64 {
        self.start.abs().min(self.end().abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start - 1e-12 * self.step && x <= self.end() + 1e-12 * self.step
    }

    /// Nearest node index, if `x` lies on the axis.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        Some((((x - self.start) / self.step).round() as usize).min(self.len - 1))
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len {
            0.5 * self.step
        } else {
            self.step
        }
    }

    pub fn same_as(&self, other: &Axis) -> bool {
        self.len == other.len
            && (self.start - other.start).abs() <= 1e-12 * self.step
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub a: Axis,
    pub b: Axis,
}

impl Grid2 {
    pub fn new(a: Axis, b: Axis) -> Self {
        Self { a, b }
    }

    /// Square grid `[−L, L]²` with `n` nodes per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let ax = Axis::symmetric(half_width, n)?;
        Ok(Self { a: ax, b: ax })
    }

    pub fn len(&self) -> usize {
        self.a.len * self.b.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.b.len + j
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.a.value(i), self.b.value(j))
    }

    /// True when `(i, j)` lies at least `band` nodes away from every edge.
    pub fn is_interior(&self, i: usize, j: usize, band: usize) -> bool {
        i >= band && j >= band && i + band < self.a.len && j + band < self.b.len
    }
}

/// A complex wave function sampled on a uniform grid; `values` is row-major
/// with the first axis slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub basis: Basis,
    pub grid: Grid2,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(basis: Basis, grid: Grid2, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("grid has {} nodes but {} values were given", grid.len(), values.len()));
        }
        Ok(Self { basis, grid, values })
    }

    pub fn zeros(basis: Basis, grid: Grid2) -> Self {
        Self {
            basis,
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(basis: Basis, grid: Grid2, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        use rayon::prelude::*;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (c1, c2) = grid.point(k / grid.b.len, k % grid.b.len);
                f(c1, c2)
            })
            .collect();
        Self { basis, grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    /// Value at node `(i, j)` or zero outside the grid.
    pub fn at_or_zero(&self, i: isize, j: isize) -> Complex64 {
        if i < 0 || j < 0 || i as usize >= self.grid.a.len || j as usize >= self.grid.b.len {
            Complex64::new(0.0, 0.0)
        } else {
            self.at(i as usize, j as usize)
        }
    }

    fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.basis != other.basis || !self.grid.a.same_as(&other.grid.a) || !self.grid.b.same_as(&other.grid.b) {
            return domain("grid functions live on different grids or bases");
        }
        Ok(())
    }

    /// Trapezoid rule for `Σ w_ij f(ψ_ij)` restricted to nodes at least `band`
    /// away from the edges.
    fn integrate_with(&self, band: usize, f: impl Fn(usize, Complex64) -> Complex64) -> Complex64 {
        let g = &self.grid;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..g.a.len {
            let wa = g.a.weight(i);
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..g.b.len {
                if g.is_interior(i, j, band) {
                    let k = g.index(i, j);
                    row += f(k, self.values[k]) * g.b.weight(j);
                }
            }
            acc += row * wa;
        }
        acc
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq_interior(0)
    }

    pub fn norm_sq_interior(&self, band: usize) -> f64 {
        self.integrate_with(band, |_, v| Complex64::new(v.norm_sqr(), 0.0)).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return domain("cannot normalize a zero or non-finite state");
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(self)
    }

    /// `⟨self|other⟩ = ∫ self* · other`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self.integrate_with(0, |k, v| v.conj() * other.values[k]))
    }

    /// `‖self − other‖` over nodes at least `band` away from the edges.
    pub fn distance_interior(&self, other: &GridFunction, band: usize) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .integrate_with(band, |k, v| Complex64::new((v - other.values[k]).norm_sqr(), 0.0))
            .re
            .sqrt())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn map(&self, f: impl Fn(f64, f64, Complex64) -> Complex64) -> GridFunction {
        let g = &self.grid;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (c1, c2) = g.point(k / g.b.len, k % g.b.len);
                f(c1, c2, v)
            })
            .collect();
        GridFunction { values, ..*self }
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        self.map(|_, _, v| v * c)
    }

    pub fn combine(&self, other: &GridFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { values, ..*self })
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, c1: f64, c2: f64) -> Complex64 {
        let g = &self.grid;
        let u = (c1 - g.a.start) / g.a.step;
        let v = (c2 - g.b.start) / g.b.step;
        if !(u > -1.0 && v > -1.0 && u < g.a.len as f64 && v < g.b.len as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let (i0, j0) = (u.floor(), v.floor());
        let (fu, fv) = (u - i0, v - j0);
        let (i0, j0) = (i0 as isize, j0 as isize);
        self.at_or_zero(i0, j0) * ((1.0 - fu) * (1.0 - fv))
            + self.at_or_zero(i0 + 1, j0) * (fu * (1.0 - fv))
            + self.at_or_zero(i0, j0 + 1) * ((1.0 - fu) * fv)
            + self.at_or_zero(i0 + 1, j0 + 1) * (fu * fv)
    }

    /// CSV `c1,c2,re,im` with the basis coordinate names as headers.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let (l1, l2) = self.basis.labels();
        writeln!(w, "{l1},{l2},re,im")?;
        let g = &self.grid;
        for i in 0..g.a.len {
            for j in 0..g.b.len {
                let v = self.at(i, j);
                writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", g.a.value(i), g.b.value(j), v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Parses the output of [`Self::write_csv`].
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| crate::Error::Config("empty grid csv".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let basis = Basis::ALL
            .into_iter()
            .find(|b| {
                let (l1, l2) = b.labels();
                cols.len() == 4 && cols[0] == l1 && cols[1] == l2
            })
            .ok_or_else(|| crate::Error::Config(format!("unrecognized grid csv header {header:?}")))?;
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| crate::Error::Config(format!("grid csv line {}: {e}", n + 2)))?;
            if f.len() != 4 {
                return Err(crate::Error::Config(format!("grid csv line {} has {} fields", n + 2, f.len())));
            }
            rows.push(f);
        }
        let nb = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
        if nb < 2 || rows.len() % nb != 0 {
            return Err(crate::Error::Config("grid csv is not a full rectangular grid".into()));
        }
        let na = rows.len() / nb;
        let a: Vec<f64> = (0..na).map(|i| rows[i * nb][0]).collect();
        let b: Vec<f64> = (0..nb).map(|j| rows[j][1]).collect();
        let grid = Grid2::new(Axis::from_values(&a)?, Axis::from_values(&b)?);
        let values = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
        GridFunction::new(basis, grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> GridFunction {
        GridFunction::from_fn(Basis::Momentum, Grid2::square(8.0, 65).unwrap(), |a, b| {
            Complex64::new((-(a * a + b * b) / 2.0).exp() / std::f64::consts::PI.sqrt(), 0.0)
        })
    }

    #[test]
    fn axis_construction() {
        let ax = Axis::symmetric(2.0, 5).unwrap();
        assert_eq!(ax.values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(Axis::from_values(&[0.0, 1.0, 2.5]).is_err());
        assert!(Axis::new(0.0, 0.0, 4).is_err());
        assert_eq!(ax.nearest(0.4), Some(2));
        assert_eq!(ax.nearest(3.0), None);
    }

    #[test]
    fn gaussian_is_normalized() {
        assert!((gauss().norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_exact_on_nodes_and_linear_between() {
        let g = GridFunction::from_fn(Basis::XPy, Grid2::square(1.0, 5).unwrap(), |a, b| Complex64::new(2.0 * a - b, a));
        assert_eq!(g.interpolate(0.5, -0.5), Complex64::new(1.5, 0.5));
        assert!((g.interpolate(0.3, 0.1) - Complex64::new(0.5, 0.3)).norm() < 1e-14);
        assert_eq!(g.interpolate(3.0, 0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn csv_roundtrip() {
        let g = gauss();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.basis, Basis::Momentum);
        assert!(back.max_abs_diff(&g).unwrap() < 1e-15);
    }

    #[test]
    fn incompatible_grids_rejected() {
        let a = gauss();
        let b = GridFunction::zeros(Basis::XPy, a.grid);
        assert!(a.inner(&b).is_err());
    }
}
