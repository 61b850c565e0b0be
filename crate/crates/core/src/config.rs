//! Run configuration read from a single TOML file.
//!
//! Every key is optional and unknown keys are rejected. Precedence, from
//! strongest: command-line flag, `NCPLANE_SEED` (seed only), file, default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::NCParams;
use crate::phasespace::DEFAULT_SEED;
use crate::quantum::Stencil;
use crate::wigner::QuadratureSettings;

pub const SEED_ENV: &str = "NCPLANE_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Command line run when none is given, e.g. `"spectrum --n-max 3"`.
    pub command: Option<String>,
    /// Seed of every random sample set (42).
    pub seed: u64,
    pub physics: PhysicsConfig,
    pub numerics: NumericsConfig,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            seed: DEFAULT_SEED,
            physics: PhysicsConfig::default(),
            numerics: NumericsConfig::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    /// 1
    pub m: f64,
    /// 1
    pub omega: f64,
    /// 0
    pub theta: f64,
    /// 1
    pub hbar: f64,
    /// 1
    pub kb: f64,
    /// Number of oscillators of the Einstein solid (1).
    pub n: u64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        let p = NCParams::default();
        Self {
            m: p.m,
            omega: p.omega,
            theta: p.theta,
            hbar: p.hbar,
            kb: p.kb,
            n: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// RK4 step (1e-3).
    pub dt: f64,
    /// End of classical runs (20).
    pub t_end: f64,
    /// Keep every n-th RK4 sample in trajectory files (10).
    pub every: usize,
    /// Random points per algebra check (100).
    pub samples: usize,
    /// Sample points are drawn from `[-w, w]^4` (10).
    pub sample_half_width: f64,
    /// Time at which the explicitly time dependent boosts are evaluated (0).
    pub algebra_time: f64,
    /// Eigenfunction grid nodes per axis (256).
    pub grid_nodes: usize,
    /// Eigenfunction grid half width in units of sqrt(m hbar varpi) (8).
    pub grid_widths: f64,
    /// Finite-difference order: 4, 6 or 8 (8).
    pub stencil_order: usize,
    /// Relative singular value cutoff of the symmetry nullspace (1e-10).
    pub svd_threshold: f64,
    /// Wigner state grid half width in oscillator widths (8).
    pub wigner_widths: f64,
    /// Minimum Wigner state grid nodes per axis (96).
    pub wigner_nodes: usize,
    /// Stride of the outer Wigner quadrature (2).
    pub outer_stride: usize,
    /// Largest boundary value of a Wigner input state relative to its peak (1e-6).
    pub edge_tolerance: f64,
    /// Nodes per axis of Wigner slices (41).
    pub slice_nodes: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let q = QuadratureSettings::default();
        Self {
            dt: 1e-3,
            t_end: 20.0,
            every: 10,
            samples: 100,
            sample_half_width: 10.0,
            algebra_time: 0.0,
            grid_nodes: 256,
            grid_widths: 8.0,
            stencil_order: 8,
            svd_threshold: 1e-10,
            wigner_widths: q.widths,
            wigner_nodes: q.nodes,
            outer_stride: q.outer_stride,
            edge_tolerance: q.edge_tolerance,
            slice_nodes: 41,
        }
    }
}

impl NumericsConfig {
    pub fn quadrature(&self) -> QuadratureSettings {
        QuadratureSettings {
            widths: self.wigner_widths,
            nodes: self.wigner_nodes,
            outer_stride: self.outer_stride,
            edge_tolerance: self.edge_tolerance,
        }
    }

    pub fn stencil(&self) -> Result<Stencil> {
        Stencil::new(self.stencil_order).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Galilei bracket residuals (1e-9).
    pub algebra: f64,
    /// RK4 against the closed-form oscillator, positions (1e-6).
    pub closed_form: f64,
    /// Relative drift of conserved charges along RK4 runs (1e-7).
    pub charge_drift: f64,
    /// Span membership and structure-constant residuals (1e-10).
    pub symmetry: f64,
    /// Relative eigen-residuals of H and J (1e-6).
    pub eigen: f64,
    /// Wigner normalization (1e-6).
    pub normalization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebra: 1e-9,
            closed_form: 1e-6,
            charge_drift: 1e-7,
            symmetry: 1e-10,
            eigen: 1e-6,
            normalization: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory receiving every output file ("ncplane-out").
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("ncplane-out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Replaces the seed with `NCPLANE_SEED` when that variable is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got {v:?}")))?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<NCParams> {
        let f = &self.physics;
        NCParams::new(f.m, f.omega, f.theta, f.hbar, f.kb).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        let n = &self.numerics;
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if self.physics.n == 0 {
            return bad("physics.n must be at least 1");
        }
        if !(n.dt > 0.0) || !(n.t_end > 0.0) {
            return bad("numerics.dt and numerics.t_end must be positive");
        }
        if n.every == 0 || n.samples == 0 || n.outer_stride == 0 || n.slice_nodes == 0 {
            return bad("numerics.every, samples, outer_stride and slice_nodes must be at least 1");
        }
        if n.grid_nodes < 16 || n.wigner_nodes < 16 {
            return bad("numerics.grid_nodes and wigner_nodes must be at least 16");
        }
        if !(n.grid_widths > 0.0) || !(n.wigner_widths > 0.0) || !(n.sample_half_width > 0.0) {
            return bad("numerics widths must be positive");
        }
        if !(n.svd_threshold > 0.0) || !(n.edge_tolerance > 0.0) {
            return bad("numerics.svd_threshold and edge_tolerance must be positive");
        }
        n.stencil()?;
        let t = &self.tolerances;
        if [t.algebra, t.closed_form, t.charge_drift, t.symmetry, t.eigen, t.normalization]
            .iter()
            .any(|v| !(*v > 0.0))
        {
            return bad("tolerances must be positive");
        }
        Ok(())
    }

    /// The configuration with every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }
}
