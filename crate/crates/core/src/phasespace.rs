//! The theta-deformed symplectic structure on the four-dimensional phase
//! space `(x, y, p_x, p_y)`.
//!
//! The bracket of two fields is
//!
//! ```text
//! {f, g} = ∂f/∂q_i ∂g/∂p_i − ∂f/∂p_i ∂g/∂q_i + θ ε_ij ∂f/∂q_i ∂g/∂q_j
//! ```
//!
//! with `ε_12 = 1`. Derivatives are exact: every field is evaluated over a
//! generic [`Scalar`], and gradients come from seeding [`Dual`] numbers.
//! Nesting a [`Bracket`] inside another bracket evaluates the inner one over
//! `Dual<Dual<f64>>`, which is how the Jacobi residual gets its second
//! derivatives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::params::NCParams;

/// Default seed for every randomly sampled check.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint {
        x: 0.0,
        y: 0.0,
        px: 0.0,
        py: 0.0,
    };

    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        Self { x, y, px, py }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.px, self.py]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.y, self.px, self.py)
    }
}

/// A real function on phase space, possibly explicitly time dependent.
///
/// Implementors must be written generically over [`Scalar`] so that the
/// same code path produces exact derivatives.
pub trait PhaseField: Sync {
    fn eval<S: Scalar>(&self, z: [S; 4], t: S) -> S;

    fn name(&self) -> String {
        "field".to_string()
    }

    fn value(&self, z: PhasePoint, t: f64) -> f64 {
        self.eval(z.to_array(), t)
    }
}

impl<F: PhaseField + ?Sized> PhaseField for &F {
    fn eval<S: Scalar>(&self, z: [S; 4], t: S) -> S {
        (**self).eval(z, t)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// Exact gradient with respect to `(x, y, p_x, p_y)`.
pub fn gradient<F, S>(f: &F, z: [S; 4], t: S) -> [S; 4]
where
    F: PhaseField + ?Sized,
    S: Scalar,
{
    let lifted = z.map(Dual::constant);
    let mut out = [S::zero(); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut seeded = lifted;
        seeded[k] = Dual::variable(z[k]);
        *slot = f.eval(seeded, Dual::constant(t)).eps;
    }
    out
}

/// Explicit partial derivative with respect to time.
pub fn time_derivative<F, S>(f: &F, z: [S; 4], t: S) -> S
where
    F: PhaseField + ?Sized,
    S: Scalar,
{
    f.eval(z.map(Dual::constant), Dual::variable(t)).eps
}

fn bracket_of_gradients<S: Scalar>(df: &[S; 4], dg: &[S; 4], theta: f64) -> S {
    let canonical = df[0] * dg[2] + df[1] * dg[3] - df[2] * dg[0] - df[3] * dg[1];
    canonical + (df[0] * dg[1] - df[1] * dg[0]).scale(theta)
}

/// The deformed bracket `{f, g}` as a field in its own right.
pub struct Bracket<F, G> {
    pub f: F,
    pub g: G,
    pub theta: f64,
}

impl<F: PhaseField, G: PhaseField> Bracket<F, G> {
    pub fn new(f: F, g: G, theta: f64) -> Self {
        Self { f, g, theta }
    }
}

impl<F: PhaseField, G: PhaseField> PhaseField for Bracket<F, G> {
    fn eval<S: Scalar>(&self, z: [S; 4], t: S) -> S {
        let df = gradient(&self.f, z, t);
        let dg = gradient(&self.g, z, t);
        bracket_of_gradients(&df, &dg, self.theta)
    }

    fn name(&self) -> String {
        format!("{{{}, {}}}", self.f.name(), self.g.name())
    }
}

fn checked_gradient<F: PhaseField + ?Sized>(f: &F, z: PhasePoint, t: f64) -> Result<[f64; 4]> {
    let g = gradient(f, z.to_array(), t);
    if g.iter().all(|v| v.is_finite()) {
        Ok(g)
    } else {
        Err(Error::Evaluation { field: f.name() })
    }
}

/// `{f, g}` at `(z, t)`.
pub fn poisson_bracket<F, G>(f: &F, g: &G, z: PhasePoint, t: f64, p: &NCParams) -> Result<f64>
where
    F: PhaseField + ?Sized,
    G: PhaseField + ?Sized,
{
    let df = checked_gradient(f, z, t)?;
    let dg = checked_gradient(g, z, t)?;
    Ok(bracket_of_gradients(&df, &dg, p.theta))
}

/// `{f,{g,h}} − {{f,g},h} − {g,{f,h}}`, which vanishes for a Poisson bracket.
pub fn jacobi_residual<F, G, H>(f: &F, g: &G, h: &H, z: PhasePoint, t: f64, p: &NCParams) -> Result<f64>
where
    F: PhaseField,
    G: PhaseField,
    H: PhaseField,
{
    let th = p.theta;
    let zs = z.to_array();
    let a = Bracket::new(f, Bracket::new(g, h, th), th).eval(zs, t);
    let b = Bracket::new(Bracket::new(f, g, th), h, th).eval(zs, t);
    let c = Bracket::new(g, Bracket::new(f, h, th), th).eval(zs, t);
    let r = a - b - c;
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Evaluation {
            field: format!("jacobi({}, {}, {})", f.name(), g.name(), h.name()),
        })
    }
}

/// Phase-space coordinate selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coord {
    X,
    Y,
    Px,
    Py,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::X, Coord::Y, Coord::Px, Coord::Py];

    pub fn index(self) -> usize {
        match self {
            Coord::X => 0,
            Coord::Y => 1,
            Coord::Px => 2,
            Coord::Py => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::Px => "px",
            Coord::Py => "py",
        }
    }

    pub fn parse(s: &str) -> Option<Coord> {
        match s.trim() {
            "x" => Some(Coord::X),
            "y" => Some(Coord::Y),
            "px" | "p_x" => Some(Coord::Px),
            "py" | "p_y" => Some(Coord::Py),
            _ => None,
        }
    }
}

/// A small expression tree for building phase-space fields at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Const(f64),
    Coord(Coord),
    Time,
    Add(Box<Field>, Box<Field>),
    Sub(Box<Field>, Box<Field>),
    Mul(Box<Field>, Box<Field>),
    Neg(Box<Field>),
    Powi(Box<Field>, i32),
    Exp(Box<Field>),
    Named(String, Box<Field>),
}

impl Field {
    pub fn x() -> Field {
        Field::Coord(Coord::X)
    }
    pub fn y() -> Field {
        Field::Coord(Coord::Y)
    }
    pub fn px() -> Field {
        Field::Coord(Coord::Px)
    }
    pub fn py() -> Field {
        Field::Coord(Coord::Py)
    }
    pub fn time() -> Field {
        Field::Time
    }
    pub fn constant(c: f64) -> Field {
        Field::Const(c)
    }

    pub fn powi(self, n: i32) -> Field {
        Field::Powi(Box::new(self), n)
    }

    pub fn exp(self) -> Field {
        Field::Exp(Box::new(self))
    }

    pub fn named(self, name: impl Into<String>) -> Field {
        Field::Named(name.into(), Box::new(self))
    }
}

impl PhaseField for Field {
    fn eval<S: Scalar>(&self, z: [S; 4], t: S) -> S {
        match self {
            Field::Const(c) => S::from_f64(*c),
            Field::Coord(c) => z[c.index()],
            Field::Time => t,
            Field::Add(a, b) => a.eval(z, t) + b.eval(z, t),
            Field::Sub(a, b) => a.eval(z, t) - b.eval(z, t),
            Field::Mul(a, b) => a.eval(z, t) * b.eval(z, t),
            Field::Neg(a) => -a.eval(z, t),
            Field::Powi(a, n) => a.eval(z, t).powi(*n),
            Field::Exp(a) => a.eval(z, t).exp(),
            Field::Named(_, a) => a.eval(z, t),
        }
    }

    fn name(&self) -> String {
        match self {
            Field::Named(n, _) => n.clone(),
            Field::Const(c) => format!("{c}"),
            Field::Coord(c) => c.label().to_string(),
            Field::Time => "t".to_string(),
            _ => "expr".to_string(),
        }
    }
}

impl Add for Field {
    type Output = Field;
    fn add(self, o: Field) -> Field {
        Field::Add(Box::new(self), Box::new(o))
    }
}

impl Sub for Field {
    type Output = Field;
    fn sub(self, o: Field) -> Field {
        Field::Sub(Box::new(self), Box::new(o))
    }
}

impl Mul for Field {
    type Output = Field;
    fn mul(self, o: Field) -> Field {
        Field::Mul(Box::new(self), Box::new(o))
    }
}

impl Mul<Field> for f64 {
    type Output = Field;
    fn mul(self, o: Field) -> Field {
        Field::Mul(Box::new(Field::Const(self)), Box::new(o))
    }
}

impl Add<f64> for Field {
    type Output = Field;
    fn add(self, c: f64) -> Field {
        self + Field::Const(c)
    }
}

impl Neg for Field {
    type Output = Field;
    fn neg(self) -> Field {
        Field::Neg(Box::new(self))
    }
}

/// Free-particle Hamiltonian `p·p / 2m`.
pub fn free_hamiltonian(p: &NCParams) -> Field {
    let inv = 0.5 / p.m;
    (inv * (Field::px().powi(2) + Field::py().powi(2))).named("H")
}

/// Isotropic oscillator Hamiltonian `p·p/2m + m ω² q·q / 2`.
pub fn oscillator_hamiltonian(p: &NCParams) -> Field {
    let kin = 0.5 / p.m;
    let pot = 0.5 * p.m * p.omega * p.omega;
    (kin * (Field::px().powi(2) + Field::py().powi(2)) + pot * (Field::x().powi(2) + Field::y().powi(2)))
        .named("H")
}

/// The six Galilei generators of a free particle on the NC plane.
#[derive(Debug, Clone)]
pub struct GalileiGenerators {
    pub h: Field,
    pub p1: Field,
    pub p2: Field,
    pub j: Field,
    pub k1: Field,
    pub k2: Field,
}

impl GalileiGenerators {
    pub fn as_array(&self) -> [&Field; 6] {
        [&self.h, &self.p1, &self.p2, &self.j, &self.k1, &self.k2]
    }

    pub fn momentum(&self, i: usize) -> &Field {
        if i == 0 {
            &self.p1
        } else {
            &self.p2
        }
    }

    pub fn boost(&self, i: usize) -> &Field {
        if i == 0 {
            &self.k1
        } else {
            &self.k2
        }
    }
}

/// `H = p²/2m`, `p_i`, `J = ε_ij q_i p_j + (θ/2) p_k p_k` and the explicitly
/// time-dependent boosts `k_i = m q_i − p_i t + m θ ε_ij p_j`.
pub fn galilei_generators(p: &NCParams) -> GalileiGenerators {
    let (m, th) = (p.m, p.theta);
    let j = Field::x() * Field::py() - Field::y() * Field::px()
        + (0.5 * th) * (Field::px().powi(2) + Field::py().powi(2));
    let k1 = m * Field::x() - Field::px() * Field::time() + (m * th) * Field::py();
    let k2 = m * Field::y() - Field::py() * Field::time() - (m * th) * Field::px();
    GalileiGenerators {
        h: free_hamiltonian(p),
        p1: Field::px().named("p1"),
        p2: Field::py().named("p2"),
        j: j.named("J"),
        k1: k1.named("k1"),
        k2: k2.named("k2"),
    }
}

fn levi_civita(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub max_residual: f64,
    pub pass: bool,
}

/// Outcome of checking the Galilei algebra on a set of sample points.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub m: f64,
    pub theta: f64,
    pub t: f64,
    pub tolerance: f64,
    pub relations: Vec<RelationResidual>,
    pub samples: Vec<PhasePoint>,
}

impl AlgebraReport {
    pub fn all_pass(&self) -> bool {
        self.relations.iter().all(|r| r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.relations.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }

    pub fn residual(&self, relation: &str) -> Option<f64> {
        self.relations
            .iter()
            .find(|r| r.relation == relation)
            .map(|r| r.max_residual)
    }

    pub fn to_table(&self) -> String {
        let width = self.relations.iter().map(|r| r.relation.len()).max().unwrap_or(8);
        let mut s = format!(
            "Galilei algebra  m = {}  theta = {}  t = {}  samples = {}  tol = {:e}\n",
            self.m,
            self.theta,
            self.t,
            self.samples.len(),
            self.tolerance
        );
        s.push_str(&format!("{:<width$}  {:>12}  result\n", "relation", "max residual"));
        for r in &self.relations {
            s.push_str(&format!(
                "{:<width$}  {:>12.3e}  {}\n",
                r.relation,
                r.max_residual,
                if r.pass { "PASS" } else { "FAIL" }
            ));
        }
        s
    }
}

/// The eight relation names in the order they are reported.
pub const ALGEBRA_RELATIONS: [&str; 8] = [
    "{p_i,H} = 0",
    "{p_i,p_j} = 0",
    "{J,H} = 0",
    "{J,p_i} = eps_ij p_j",
    "{k_j,H} = p_j",
    "{k_j,p_i} = m delta_ji",
    "{J,k_i} = eps_ij k_j",
    "{k_i,k_j} = -m^2 theta eps_ij",
];

fn relation_residuals(gens: &GalileiGenerators, z: PhasePoint, t: f64, p: &NCParams) -> Result<[f64; 8]> {
    let pb = |f: &Field, g: &Field| poisson_bracket(f, g, z, t, p);
    let mut r = [0.0f64; 8];
    let mut bump = |k: usize, v: f64| r[k] = r[k].max(v.abs());
    for i in 0..2 {
        bump(0, pb(gens.momentum(i), &gens.h)?);
        bump(3, pb(&gens.j, gens.momentum(i))? - (0..2).map(|j| levi_civita(i, j) * gens.momentum(j).value(z, t)).sum::<f64>());
        bump(4, pb(gens.boost(i), &gens.h)? - gens.momentum(i).value(z, t));
        bump(6, pb(&gens.j, gens.boost(i))? - (0..2).map(|j| levi_civita(i, j) * gens.boost(j).value(z, t)).sum::<f64>());
        for j in 0..2 {
            bump(1, pb(gens.momentum(i), gens.momentum(j))?);
            let delta = if i == j { 1.0 } else { 0.0 };
            bump(5, pb(gens.boost(j), gens.momentum(i))? - p.m * delta);
            bump(7, pb(gens.boost(i), gens.boost(j))? + p.m * p.m * p.theta * levi_civita(i, j));
        }
    }
    bump(2, pb(&gens.j, &gens.h)?);
    Ok(r)
}

/// Evaluates every Galilei bracket relation at every sample and reports the
/// largest deviation per relation.
pub fn verify_algebra(p: &NCParams, t: f64, samples: &[PhasePoint], tol: f64) -> Result<AlgebraReport> {
    p.validate()?;
    if samples.is_empty() {
        return Err(Error::Domain("verify_algebra needs at least one sample".into()));
    }
    let gens = galilei_generators(p);
    let per_point: Vec<[f64; 8]> = samples
        .par_iter()
        .map(|z| relation_residuals(&gens, *z, t, p))
        .collect::<Result<_>>()?;
    let mut max = [0.0f64; 8];
    for r in &per_point {
        for k in 0..8 {
            max[k] = max[k].max(r[k]);
        }
    }
    let relations = ALGEBRA_RELATIONS
        .iter()
        .zip(max)
        .map(|(name, v)| RelationResidual {
            relation: name.to_string(),
            max_residual: v,
            pass: v < tol,
        })
        .collect();
    Ok(AlgebraReport {
        m: p.m,
        theta: p.theta,
        t,
        tolerance: tol,
        relations,
        samples: samples.to_vec(),
    })
}

/// `n` points drawn uniformly from `[-half_width, half_width]^4`.
pub fn sample_points(n: usize, seed: u64, half_width: f64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut a = [0.0; 4];
            for v in &mut a {
                *v = rng.gen_range(-half_width..=half_width);
            }
            PhasePoint::from_array(a)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient(f: &Field, z: PhasePoint, t: f64) -> [f64; 4] {
        let base = z.to_array();
        let mut g = [0.0; 4];
        for k in 0..4 {
            let h = f64::EPSILON.cbrt() * base[k].abs().max(1.0);
            let mut a = base;
            let mut b = base;
            a[k] += h;
            b[k] -= h;
            g[k] = (f.eval(a, t) - f.eval(b, t)) / (2.0 * h);
        }
        g
    }

    #[test]
    fn canonical_brackets() {
        let p = NCParams::unit(0.37);
        let z = PhasePoint::new(1.0, -2.0, 0.5, 3.0);
        let pb = |f: &Field, g: &Field| poisson_bracket(f, g, z, 0.0, &p).unwrap();
        assert_eq!(pb(&Field::x(), &Field::y()), 0.37);
        assert_eq!(pb(&Field::px(), &Field::py()), 0.0);
        assert_eq!(pb(&Field::x(), &Field::px()), 1.0);
        assert_eq!(pb(&Field::y(), &Field::py()), 1.0);
        let f = Field::x() * Field::py().powi(3) + Field::y().exp();
        assert_eq!(pb(&f, &f), 0.0);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let f = (Field::x() * Field::py() - 0.3 * Field::y().powi(3) * Field::px()).exp() + Field::px().powi(2);
        for z in sample_points(20, 7, 1.0) {
            let exact = gradient(&f, z.to_array(), 0.0);
            let fd = fd_gradient(&f, z, 0.0);
            for k in 0..4 {
                assert!((exact[k] - fd[k]).abs() <= 1e-6 * exact[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn non_finite_gradient_names_the_field() {
        let f = Field::x().powi(-1).named("inverse_x");
        let p = NCParams::default();
        let err = poisson_bracket(&f, &Field::px(), PhasePoint::ORIGIN, 0.0, &p).unwrap_err();
        match err {
            Error::Evaluation { field } => assert_eq!(field, "inverse_x"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generator_values() {
        let p = NCParams::unit(0.0).with_m(3.0);
        let g = galilei_generators(&p);
        let z = PhasePoint::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(g.k1.value(z, 0.0), 3.0);
        assert_eq!(g.k2.value(z, 0.0), 6.0);
        assert_eq!(g.j.value(z, 0.0), 1.0 * 4.0 - 2.0 * 3.0);

        let p = NCParams::unit(2.0).with_m(5.0);
        let g = galilei_generators(&p);
        assert_eq!(g.j.value(PhasePoint::new(0.0, 0.0, 1.0, 0.0), 0.0), 1.0);
        assert_eq!(g.h.value(PhasePoint::new(5.0, 5.0, 0.0, 0.0), 0.0), 0.0);
    }

    #[test]
    fn algebra_holds_at_random_points() {
        let p = NCParams::unit(0.7).with_m(2.0);
        let report = verify_algebra(&p, 1.3, &sample_points(100, DEFAULT_SEED, 10.0), 1e-9).unwrap();
        assert!(report.all_pass(), "{}", report.to_table());
        assert_eq!(report.relations.len(), 8);
    }

    #[test]
    fn commutative_boosts_commute() {
        let p = NCParams::unit(0.0).with_m(2.0);
        let g = galilei_generators(&p);
        for z in sample_points(10, 3, 10.0) {
            assert_eq!(poisson_bracket(&g.k1, &g.k2, z, 0.4, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn algebra_at_origin_matches_structure() {
        // brute force at a single point: {k1,k2} = -m^2 theta, {k1,p1} = m
        let p = NCParams::unit(0.5).with_m(2.0);
        let g = galilei_generators(&p);
        let z = PhasePoint::ORIGIN;
        assert_eq!(poisson_bracket(&g.k1, &g.k2, z, 0.0, &p).unwrap(), -2.0);
        assert_eq!(poisson_bracket(&g.k1, &g.p1, z, 0.0, &p).unwrap(), 2.0);
        let report = verify_algebra(&p, 0.0, &[z], 1e-12).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn empty_sample_set_is_rejected() {
        assert!(verify_algebra(&NCParams::default(), 0.0, &[], 1e-9).is_err());
    }

    #[test]
    fn jacobi_for_constant_and_generator_brackets() {
        let p = NCParams::unit(0.8).with_m(1.5);
        let z = PhasePoint::new(0.3, -1.2, 2.0, 0.7);
        let r = jacobi_residual(&Field::x(), &Field::y(), &Field::px(), z, 0.0, &p).unwrap();
        assert!(r.abs() < 1e-12);
        let g = galilei_generators(&p);
        let r = jacobi_residual(&g.h, &g.j, &g.k1, z, 0.9, &p).unwrap();
        assert!(r.abs() < 1e-6);
        let r = jacobi_residual(
            &Field::x().powi(2),
            &Field::y().powi(2),
            &(Field::px() * Field::py()),
            z,
            0.0,
            &p,
        )
        .unwrap();
        assert!(r.abs() < 1e-6);
    }

    #[test]
    fn jacobi_detects_a_broken_bracket() {
        // Sanity check of the nested machinery: the nested bracket of x with
        // {y, p_x p_y} computed by hand is theta * p_x, nonzero.
        let p = NCParams::unit(0.5);
        let z = PhasePoint::new(0.0, 0.0, 2.0, 0.0);
        let inner = Bracket::new(Field::y(), Field::px() * Field::py(), p.theta);
        let v = Bracket::new(Field::x(), inner, p.theta).value(z, 0.0);
        // {y, px py} = px, {x, px} = 1
        assert!((v - 1.0).abs() < 1e-14);
    }
}
