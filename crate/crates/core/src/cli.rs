//! The `ncplane` command line.
//!
//! Exit status: 0 when every enabled check passes, 1 when a check fails,
//! 2 on configuration or usage errors.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::classical::{hamiltonian_flow, noether_charges, oscillator_solution, Charges};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::params::NCParams;
use crate::phasespace::{free_hamiltonian, oscillator_hamiltonian, sample_points, verify_algebra, Coord, Field, PhaseField, PhasePoint};
use crate::quantum::eigen::momentum_width;
use crate::quantum::spectrum::write_spectrum_csv;
use crate::quantum::{
    apply_angular_momentum, apply_hamiltonian, eigen_residual, eigenfunction, energy, levels, oscillator_grid,
    transform_conjugate, Basis,
};
use crate::selftest;
use crate::symmetry::{angular_momentum_form, conserved_bilinears, membership_check, oscillator_form, structure_constants, su2_forms};
use crate::thermo::{entropy_sweep, linspace, ThermoParams};
use crate::wigner::{negativity_witness, normalization, slice, SliceSpec, WignerEvaluator};

#[derive(Debug, Parser)]
#[command(name = "ncplane", version, about = "Mechanics on the noncommutative plane")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed of random sample sets (default 42, or NCPLANE_SEED).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Physics {
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub kb: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Verify the Galilei algebra at random points.
    AlgebraCheck {
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        samples: Option<usize>,
        /// Time at which the boosts are evaluated.
        #[arg(long, allow_hyphen_values = true)]
        time: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classical trajectories and symmetries.
    #[command(subcommand)]
    Classical(ClassicalCommand),
    /// Table of oscillator levels E(n, j).
    Spectrum {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, default_value_t = 4)]
        n_max: u32,
    },
    /// Oscillator eigenfunction on a grid, with eigen-residuals.
    Eigenfunction {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// Twice the angular quantum number, in {-n, -n+2, .., n}.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        two_j: i32,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        widths: Option<f64>,
        #[arg(long, value_enum, default_value_t = BasisArg::Momentum)]
        basis: BasisArg,
    },
    /// Wigner function slice and negativity witness.
    Wigner {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        two_j: i32,
        /// Use the closed-form ground state instead of a grid state.
        #[arg(long)]
        closed_form: bool,
        /// The two varied coordinates, e.g. `x,px`.
        #[arg(long, default_value = "x,px")]
        vary: String,
        /// Values of all four coordinates `x,y,px,py`; the varied ones are ignored.
        #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
        fixed: String,
        /// `lo:hi` of the first varied coordinate (default ±4 widths).
        #[arg(long, allow_hyphen_values = true)]
        range1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        range2: Option<String>,
        /// Nodes per slice axis.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Einstein-solid thermodynamics.
    #[command(subcommand)]
    Thermo(ThermoCommand),
    /// Run the acceptance suite.
    Selftest {
        /// Also write the checks as JSON.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Print the configuration in effect as TOML.
    Config,
}

#[derive(Debug, Clone, Subcommand)]
pub enum ClassicalCommand {
    /// RK4 trajectory with Noether charges.
    Simulate {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, value_enum, default_value_t = HamiltonianArg::Oscillator)]
        hamiltonian: HamiltonianArg,
        /// Initial point `x,y,px,py`.
        #[arg(long, default_value = "1,0,0,1", allow_hyphen_values = true)]
        z0: String,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Keep every n-th step in the CSV.
        #[arg(long)]
        every: Option<usize>,
    },
    /// Conserved quadratic forms of the oscillator.
    Symmetries {
        #[command(flatten)]
        physics: Physics,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum ThermoCommand {
    /// Thermodynamic functions over a (T, theta) grid.
    Sweep {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, default_value_t = 0.05)]
        tmin: f64,
        #[arg(long, default_value_t = 5.0)]
        tmax: f64,
        #[arg(long, default_value_t = 2.0)]
        theta_max: f64,
        /// `NTxNTHETA`.
        #[arg(long, default_value = "100x100")]
        grid: String,
        /// Number of oscillators N.
        #[arg(long)]
        oscillators: Option<u64>,
        /// Fixed-theta curves in the second plot.
        #[arg(long, default_value_t = 5)]
        curves: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Momentum,
    Xpy,
    Ypx,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::Momentum => Basis::Momentum,
            BasisArg::Xpy => Basis::XPy,
            BasisArg::Ypx => Basis::YPx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamiltonianArg {
    Free,
    Oscillator,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn merge_physics(cfg: &mut RunConfig, ph: &Physics) {
    let f = &mut cfg.physics;
    f.m = ph.m.unwrap_or(f.m);
    f.omega = ph.omega.unwrap_or(f.omega);
    f.theta = ph.theta.unwrap_or(f.theta);
    f.hbar = ph.hbar.unwrap_or(f.hbar);
    f.kb = ph.kb.unwrap_or(f.kb);
}

/// Folds the command's flags into the configuration.
pub fn resolve(cli: &Cli, command: &Command) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply_env()?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    match command {
        Command::AlgebraCheck { physics, samples, time, tol } => {
            merge_physics(&mut cfg, physics);
            cfg.numerics.samples = samples.unwrap_or(cfg.numerics.samples);
            cfg.numerics.algebra_time = time.unwrap_or(cfg.numerics.algebra_time);
            cfg.tolerances.algebra = tol.unwrap_or(cfg.tolerances.algebra);
        }
        Command::Classical(ClassicalCommand::Simulate { physics, dt, t_end, every, .. }) => {
            merge_physics(&mut cfg, physics);
            cfg.numerics.dt = dt.unwrap_or(cfg.numerics.dt);
            cfg.numerics.t_end = t_end.unwrap_or(cfg.numerics.t_end);
            cfg.numerics.every = every.unwrap_or(cfg.numerics.every);
        }
        Command::Classical(ClassicalCommand::Symmetries { physics }) | Command::Spectrum { physics, .. } => {
            merge_physics(&mut cfg, physics)
        }
        Command::Eigenfunction { physics, nodes, widths, .. } => {
            merge_physics(&mut cfg, physics);
            cfg.numerics.grid_nodes = nodes.unwrap_or(cfg.numerics.grid_nodes);
            cfg.numerics.grid_widths = widths.unwrap_or(cfg.numerics.grid_widths);
        }
        Command::Wigner { physics, nodes, .. } => {
            merge_physics(&mut cfg, physics);
            cfg.numerics.slice_nodes = nodes.unwrap_or(cfg.numerics.slice_nodes);
        }
        Command::Thermo(ThermoCommand::Sweep { physics, oscillators, .. }) => {
            merge_physics(&mut cfg, physics);
            cfg.physics.n = oscillators.unwrap_or(cfg.physics.n);
        }
        Command::Selftest { .. } | Command::Config => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| config_err(format!("{what}: expected {n} comma-separated numbers, got {s:?}")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(config_err(format!("{what}: expected {n} finite numbers, got {s:?}")));
    }
    Ok(v)
}

fn parse_range(s: &str, what: &str) -> Result<(f64, f64)> {
    let bad = || config_err(format!("{what}: expected lo:hi, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || config_err(format!("--grid: expected NxM, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nt: usize = a.trim().parse().map_err(|_| bad())?;
    let nth: usize = b.trim().parse().map_err(|_| bad())?;
    if nt < 2 || nth < 2 {
        return Err(bad());
    }
    Ok((nt, nth))
}

/// Writes output files under one directory and lists them on stdout.
struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn write(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn json(&self, name: &str, v: &impl Serialize) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, v).map_err(|e| Error::Io(e.into()))?;
            writeln!(w)?;
            Ok(())
        })
    }

    fn text(&self, name: &str, s: &str) -> Result<()> {
        self.write(name, |w| Ok(w.write_all(s.as_bytes())?))
    }
}

fn verdict(name: &str, value: f64, tol: f64) -> bool {
    let ok = value < tol;
    println!("{:<44} {:>12.3e}  < {:<8.0e} {}", name, value, tol, if ok { "PASS" } else { "FAIL" });
    ok
}

/// Runs one command; `Ok(false)` means a check failed.
pub fn run(command: &Command, cfg: &RunConfig) -> Result<bool> {
    let p = cfg.params()?;
    let tol = &cfg.tolerances;
    let nm = &cfg.numerics;
    match command {
        Command::Config => {
            print!("{}", cfg.to_toml());
            Ok(true)
        }
        Command::AlgebraCheck { .. } => {
            let samples = sample_points(nm.samples, cfg.seed, nm.sample_half_width);
            let report = verify_algebra(&p, nm.algebra_time, &samples, tol.algebra)?;
            print!("{}", report.to_table());
            Out::new(&cfg.output.dir)?.json("algebra.json", &report)?;
            Ok(report.all_pass())
        }
        Command::Classical(ClassicalCommand::Simulate { hamiltonian, z0, .. }) => simulate(*hamiltonian, z0, &p, cfg),
        Command::Classical(ClassicalCommand::Symmetries { .. }) => symmetries(&p, cfg),
        Command::Spectrum { n_max, .. } => {
            let lv = levels(*n_max, &p)?;
            println!("{:>3} {:>6} {:>22}", "n", "two_j", "E");
            for e in &lv {
                println!("{:>3} {:>6} {:>22.15e}", e.n, e.two_j, e.energy);
            }
            Out::new(&cfg.output.dir)?.write("spectrum.csv", |w| write_spectrum_csv(&lv, w))?;
            Ok(true)
        }
        Command::Eigenfunction { n, two_j, basis, .. } => {
            let st = nm.stencil()?;
            let grid = oscillator_grid(&p, nm.grid_widths, nm.grid_nodes)?;
            let psi = eigenfunction(*n, *two_j, &p, grid)?;
            let e = energy(*n, *two_j, &p)?;
            let rh = eigen_residual(&apply_hamiltonian(&psi, &p, st)?, &psi, e, st)?;
            let rj = eigen_residual(&apply_angular_momentum(&psi, &p, st)?, &psi, p.hbar * *two_j as f64, st)?;
            println!("psi({n},{two_j})  E = {e:.15e}  grid {0}x{0}", nm.grid_nodes);
            let ok = verdict("|H psi - E psi| / |psi|", rh, tol.eigen) & verdict("|J psi - 2 hbar j psi| / |psi|", rj, tol.eigen);
            let basis: Basis = (*basis).into();
            let out_psi = if basis == Basis::Momentum { psi } else { transform_conjugate(&psi, basis, &p)? };
            let out = Out::new(&cfg.output.dir)?;
            out.write("eigenfunction.csv", |w| out_psi.write_csv(w))?;
            out.json(
                "eigenfunction.json",
                &json!({
                    "n": n, "two_j": two_j, "E": e, "basis": out_psi.basis,
                    "nodes": nm.grid_nodes, "half_width": grid.a.max_abs(), "stencil_order": st.order(),
                    "residual_H": rh, "residual_J": rj, "tolerance": tol.eigen, "pass": ok,
                }),
            )?;
            Ok(ok)
        }
        Command::Wigner { n, two_j, closed_form, vary, fixed, range1, range2, .. } => {
            wigner_cmd(*n, *two_j, *closed_form, vary, fixed, range1.as_deref(), range2.as_deref(), &p, cfg)
        }
        Command::Thermo(ThermoCommand::Sweep { tmin, tmax, theta_max, grid, curves, .. }) => {
            let (nt, nth) = parse_grid(grid)?;
            if !(*tmin > 0.0 && tmax > tmin && *theta_max >= 0.0) {
                return Err(config_err("thermo sweep needs 0 < tmin < tmax and theta-max >= 0"));
            }
            let tp = ThermoParams::new(cfg.physics.n, p).map_err(|e| config_err(e.to_string()))?;
            let sweep = entropy_sweep(&linspace(*tmin, *tmax, nt), &linspace(0.0, *theta_max, nth), &tp)?;
            let out = Out::new(&cfg.output.dir)?;
            out.write("thermo.csv", |w| sweep.write_csv(w))?;
            out.text("entropy_surface.gp", &sweep.surface_script("thermo.csv"))?;
            out.text("entropy_curves.gp", &sweep.curves_script("thermo.csv", *curves))?;
            println!("{nt} temperatures in [{tmin}, {tmax}], {nth} theta values in [0, {theta_max}], N = {}", tp.n);
            Ok(true)
        }
        Command::Selftest { report } => {
            let reports = selftest::run_all(cfg.seed);
            let mut ok = true;
            let total: f64 = reports.iter().map(|r| r.seconds).sum();
            for r in &reports {
                for line in r.lines() {
                    println!("{line}");
                }
                ok &= r.pass();
            }
            let within = total < 60.0;
            println!(
                "[{}] selftest seed {} ({total:.2} s, budget 60 s)",
                if ok && within { "PASS" } else { "FAIL" },
                cfg.seed
            );
            if let Some(path) = report {
                let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
                let name = path.file_name().ok_or_else(|| config_err("--report needs a file name"))?;
                Out::new(dir)?.json(&name.to_string_lossy(), &json!({ "seed": cfg.seed, "criteria": reports }))?;
            }
            Ok(ok && within)
        }
    }
}

fn simulate(kind: HamiltonianArg, z0: &str, p: &NCParams, cfg: &RunConfig) -> Result<bool> {
    let nm = &cfg.numerics;
    let z0 = PhasePoint::from_array(parse_list(z0, 4, "--z0")?.try_into().unwrap());
    let h: Field = match kind {
        HamiltonianArg::Free => free_hamiltonian(p),
        HamiltonianArg::Oscillator => {
            p.require_oscillator().map_err(|e| config_err(e.to_string()))?;
            oscillator_hamiltonian(p)
        }
    };
    let traj = noether_charges(&hamiltonian_flow(&h, z0, 0.0, nm.t_end, nm.dt, p)?, p);
    let e0 = h.value(z0, 0.0);
    let energy_drift =
        traj.points.iter().map(|z| (h.value(*z, 0.0) - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1.0);
    let drift = traj.charge_drift().expect("charges attached");
    let mut ok = verdict("relative energy drift", energy_drift, cfg.tolerances.charge_drift);
    let mut summary = json!({
        "hamiltonian": format!("{kind:?}").to_lowercase(), "z0": z0, "dt": nm.dt, "t_end": nm.t_end,
        "steps": traj.len() - 1, "energy_drift": energy_drift,
        "charge_drift": Charges::NAMES.iter().zip(drift).map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    match kind {
        HamiltonianArg::Free => {
            for (name, d) in Charges::NAMES.iter().zip(drift) {
                ok &= verdict(&format!("relative drift of {name}"), d, cfg.tolerances.charge_drift);
            }
        }
        HamiltonianArg::Oscillator => {
            ok &= verdict("relative drift of J", drift[3], cfg.tolerances.charge_drift);
            let mut worst = 0.0f64;
            for (&t, z) in traj.times.iter().zip(&traj.points) {
                let e = oscillator_solution(z0, t, p)?;
                worst = worst.max((z.x - e.x).hypot(z.y - e.y));
            }
            ok &= verdict("max position error vs closed form", worst, cfg.tolerances.closed_form);
            summary["closed_form_error"] = json!(worst);
        }
    }
    summary["pass"] = json!(ok);
    let kept: Vec<usize> = (0..traj.len()).filter(|i| i % nm.every == 0 || *i + 1 == traj.len()).collect();
    let thin = crate::classical::Trajectory {
        times: kept.iter().map(|&i| traj.times[i]).collect(),
        points: kept.iter().map(|&i| traj.points[i]).collect(),
        charges: traj.charges.as_ref().map(|c| kept.iter().map(|&i| c[i]).collect()),
    };
    let out = Out::new(&cfg.output.dir)?;
    out.write("trajectory.csv", |w| thin.write_csv(w))?;
    out.json("drift.json", &summary)?;
    Ok(ok)
}

fn symmetries(p: &NCParams, cfg: &RunConfig) -> Result<bool> {
    p.require_oscillator().map_err(|e| config_err(e.to_string()))?;
    let tol = cfg.tolerances.symmetry;
    let basis = conserved_bilinears(p, cfg.numerics.svd_threshold)?;
    let expected = if p.theta == 0.0 { 4 } else { 2 };
    println!("theta = {}  nullspace dimension {} (expected {expected})", p.theta, basis.dimension);
    println!("singular values: {}", basis.singular_values.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>().join(" "));
    let mut ok = basis.dimension == expected;
    let mut members = serde_json::Map::new();
    let mut named = vec![("H".to_string(), oscillator_form(p)), ("J".to_string(), angular_momentum_form(p.theta))];
    if p.theta == 0.0 {
        named.extend(su2_forms(p).into_iter().enumerate().map(|(i, s)| (format!("S{}", i + 1), s)));
    }
    for (name, s) in &named {
        let r = membership_check(s, &basis)?;
        ok &= verdict(&format!("{name} in span, residual"), r, tol);
        members.insert(name.clone(), json!(r));
    }
    // structure constants of the named generators that span the algebra
    let gens: Vec<_> = if p.theta == 0.0 { su2_forms(p).to_vec() } else { named.iter().map(|n| n.1).collect() };
    let labels: Vec<String> = if p.theta == 0.0 { vec!["S1".into(), "S2".into(), "S3".into()] } else { vec!["H".into(), "J".into()] };
    let sc = structure_constants(&gens, p);
    ok &= verdict("brackets outside the span", sc.max_residual(), tol);
    println!("structure constants {{A, B}} = sum_k c_k C_k over ({})", labels.join(", "));
    for (i, a) in labels.iter().enumerate() {
        for (j, b) in labels.iter().enumerate() {
            let row: Vec<String> = sc.c[i][j].iter().map(|v| format!("{v:>8.4}")).collect();
            println!("  {{{a},{b}}}: {}", row.join(" "));
        }
    }
    println!("basis matrices M (S = z^T M z / 2, z = (x, y, px, py)):");
    let mut mats = Vec::new();
    for (k, f) in basis.forms.iter().enumerate() {
        println!("  C{}:", k + 1);
        let rows: Vec<[f64; 4]> = (0..4).map(|r| [f.m[(r, 0)], f.m[(r, 1)], f.m[(r, 2)], f.m[(r, 3)]]).collect();
        for r in &rows {
            println!("    {:>10.6} {:>10.6} {:>10.6} {:>10.6}", r[0], r[1], r[2], r[3]);
        }
        mats.push(rows);
    }
    Out::new(&cfg.output.dir)?.json(
        "symmetries.json",
        &json!({
            "params": p, "dimension": basis.dimension, "expected_dimension": expected,
            "singular_values": basis.singular_values, "threshold": basis.threshold, "basis": mats,
            "membership_residuals": members, "generators": labels,
            "structure_constants": sc.c, "structure_residuals": sc.residual, "tolerance": tol, "pass": ok,
        }),
    )?;
    Ok(ok)
}

#[allow(clippy::too_many_arguments)]
fn wigner_cmd(
    n: u32,
    two_j: i32,
    closed_form: bool,
    vary: &str,
    fixed: &str,
    range1: Option<&str>,
    range2: Option<&str>,
    p: &NCParams,
    cfg: &RunConfig,
) -> Result<bool> {
    p.require_oscillator().map_err(|e| config_err(e.to_string()))?;
    let (c1, c2) = vary
        .split_once(',')
        .and_then(|(a, b)| Some((Coord::parse(a.trim())?, Coord::parse(b.trim())?)))
        .ok_or_else(|| config_err(format!("--vary: expected two of x,y,px,py, got {vary:?}")))?;
    if c1 == c2 {
        return Err(config_err("--vary needs two different coordinates"));
    }
    let fixed = PhasePoint::from_array(parse_list(fixed, 4, "--fixed")?.try_into().unwrap());
    let sp = momentum_width(p)?;
    let default_range = |c: Coord| {
        let w = if matches!(c, Coord::Px | Coord::Py) { sp } else { p.hbar / sp };
        (-4.0 * w, 4.0 * w)
    };
    let r1 = range1.map(|s| parse_range(s, "--range1")).transpose()?.unwrap_or(default_range(c1));
    let r2 = range2.map(|s| parse_range(s, "--range2")).transpose()?.unwrap_or(default_range(c2));
    let w = if closed_form {
        if (n, two_j) != (0, 0) {
            return Err(config_err("--closed-form is only available for n = 0"));
        }
        WignerEvaluator::ground_state(p)?.with_settings(cfg.numerics.quadrature())
    } else {
        WignerEvaluator::eigenstate(n, two_j, p, cfg.numerics.quadrature())?
    };
    let spec = SliceSpec {
        vary: (c1, c2),
        fixed,
        range1: r1,
        range2: r2,
        n1: cfg.numerics.slice_nodes,
        n2: cfg.numerics.slice_nodes,
    };
    let s = slice(&w, spec)?;
    let norm = normalization(&w)?;
    let witness = negativity_witness(&w)?;
    println!("psi({n},{two_j}) theta = {}  slice {}-{}: W in [{:.6e}, {:.6e}]", p.theta, c1.label(), c2.label(), s.min(), s.max());
    let ok = verdict("|integral W - 1|", (norm - 1.0).abs(), cfg.tolerances.normalization);
    println!(
        "negativity witness: {} (min W = {:.6e} at {}, max W = {:.6e})",
        if witness.found { "found" } else { "none" },
        witness.min,
        witness.point,
        witness.max
    );
    let out = Out::new(&cfg.output.dir)?;
    out.write("wigner_slice.csv", |wr| s.write_csv(wr))?;
    out.text("wigner_slice.gp", &s.plot_script("wigner_slice.csv"))?;
    out.json(
        "wigner.json",
        &json!({
            "n": n, "two_j": two_j, "closed_form": closed_form, "params": p,
            "slice": { "vary": [c1.label(), c2.label()], "fixed": fixed, "range1": r1, "range2": r2,
                       "nodes": cfg.numerics.slice_nodes, "min": s.min(), "max": s.max() },
            "normalization": norm, "negativity": witness, "tolerance": cfg.tolerances.normalization, "pass": ok,
        }),
    )?;
    Ok(ok)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Accuracy(_) | Error::Divergence { .. } | Error::Evaluation { .. } => 1,
        _ => 2,
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command = match cli.command.clone() {
        Some(c) => c,
        None => {
            let from_file = cli
                .config
                .as_ref()
                .map(|p| RunConfig::load(p))
                .transpose()
                .map(|c| c.and_then(|c| c.command));
            match from_file {
                Ok(Some(line)) => match Cli::try_parse_from(std::iter::once("ncplane".to_string()).chain(line.split_whitespace().map(String::from))) {
                    Ok(Cli { command: Some(c), .. }) => c,
                    Ok(_) => {
                        eprintln!("error: config `command` names no subcommand");
                        return 2;
                    }
                    Err(e) => {
                        eprintln!("error: config `command` {line:?}: {e}");
                        return 2;
                    }
                },
                Ok(None) => {
                    eprintln!("error: no command given; see `ncplane --help`");
                    return 2;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
        }
    };
    let cfg = match resolve(&cli, &command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&command, &cfg) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
