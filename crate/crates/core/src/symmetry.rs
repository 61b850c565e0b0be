//! Bilinear conserved quantities of the oscillator as the nullspace of
//! `M ↦ {H, ½zᵀMz}`.
//!
//! For quadratic forms `S_A = ½zᵀAz` and `S_B = ½zᵀBz` the deformed bracket is
//! again quadratic, `{S_A, S_B} = ½zᵀ(AΠB − BΠA)z`, with the Poisson tensor
//! `Π = [[θε, I], [−I, 0]]` in the ordering `(x, y, p_x, p_y)`.
//!
//! A first-order symmetry generator `δz = Π∇S = ΠMz` corresponds to the
//! linear vector field with matrix `a = ΠM`, so `M = Π⁻¹a` whenever the
//! generator is Hamiltonian.

use nalgebra::{DMatrix, DVector, Matrix4, SVector, Vector4};
use serde::Serialize;

use crate::dual::Scalar;
use crate::error::{domain, Result};
use crate::params::NCParams;
use crate::phasespace::PhaseField;

/// Dimension of the space of real symmetric 4×4 matrices.
pub const SYM_DIM: usize = 10;

pub const DEFAULT_SVD_THRESHOLD: f64 = 1e-10;

/// `S(z) = ½ zᵀ M z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearForm {
    pub m: Matrix4<f64>,
}

impl BilinearForm {
    /// Symmetrizes `m`.
    pub fn new(m: Matrix4<f64>) -> Self {
        Self {
            m: 0.5 * (m + m.transpose()),
        }
    }

    pub fn value_at(&self, z: [f64; 4]) -> f64 {
        let v = Vector4::from(z);
        0.5 * v.dot(&(self.m * v))
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// Frobenius-isometric coordinates: diagonal entries, then `√2·M_ab`
    /// for `a < b`.
    pub fn to_vec(&self) -> SVector<f64, SYM_DIM> {
        let mut v = SVector::<f64, SYM_DIM>::zeros();
        let mut k = 0;
        for a in 0..4 {
            v[k] = self.m[(a, a)];
            k += 1;
        }
        for a in 0..4 {
            for b in a + 1..4 {
                v[k] = std::f64::consts::SQRT_2 * self.m[(a, b)];
                k += 1;
            }
        }
        v
    }

    pub fn from_vec(v: &SVector<f64, SYM_DIM>) -> Self {
        let mut m = Matrix4::zeros();
        let mut k = 0;
        for a in 0..4 {
            m[(a, a)] = v[k];
            k += 1;
        }
        for a in 0..4 {
            for b in a + 1..4 {
                m[(a, b)] = v[k] / std::f64::consts::SQRT_2;
                m[(b, a)] = m[(a, b)];
                k += 1;
            }
        }
        Self { m }
    }

    /// `{self, other}` as a bilinear form.
    pub fn bracket(&self, other: &BilinearForm, theta: f64) -> BilinearForm {
        let pi = poisson_tensor(theta);
        BilinearForm {
            m: self.m * pi * other.m - other.m * pi * self.m,
        }
    }
}

impl PhaseField for BilinearForm {
    fn eval<S: Scalar>(&self, z: [S; 4], _t: S) -> S {
        let mut acc = S::zero();
        for a in 0..4 {
            for b in 0..4 {
                let c = self.m[(a, b)];
                if c != 0.0 {
                    acc += (z[a] * z[b]).scale(0.5 * c);
                }
            }
        }
        acc
    }

    fn name(&self) -> String {
        "bilinear".into()
    }
}

/// `Π` with `{f, g} = ∇fᵀ Π ∇g`.
pub fn poisson_tensor(theta: f64) -> Matrix4<f64> {
    Matrix4::new(
        0.0, theta, 1.0, 0.0, //
        -theta, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// `H = p²/2m + mω²q²/2` as a bilinear form.
pub fn oscillator_form(p: &NCParams) -> BilinearForm {
    let k = p.m * p.omega * p.omega;
    let im = 1.0 / p.m;
    BilinearForm::new(Matrix4::from_diagonal(&Vector4::new(k, k, im, im)))
}

fn form_from(entries: &[(usize, usize, f64)]) -> BilinearForm {
    let mut m = Matrix4::zeros();
    for &(a, b, v) in entries {
        m[(a, b)] = v;
        m[(b, a)] = v;
    }
    BilinearForm { m }
}

/// The commutative su(2) generators `S₁⁰, S₂⁰, S₃⁰`.
pub fn su2_forms(p: &NCParams) -> [BilinearForm; 3] {
    let mw = p.m * p.omega;
    let s1 = form_from(&[(0, 1, 0.5 * mw), (2, 3, 0.5 / mw)]);
    let s2 = form_from(&[(0, 0, -0.5 * mw), (1, 1, 0.5 * mw), (2, 2, -0.5 / mw), (3, 3, 0.5 / mw)]);
    let s3 = form_from(&[(0, 3, 0.5), (1, 2, -0.5)]);
    [s1, s2, s3]
}

/// `J = x p_y − y p_x + (θ/2)(p_x² + p_y²)`.
pub fn angular_momentum_form(theta: f64) -> BilinearForm {
    form_from(&[(0, 3, 1.0), (1, 2, -1.0), (2, 2, theta), (3, 3, theta)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryBasis {
    pub forms: Vec<BilinearForm>,
    pub dimension: usize,
    /// Singular values of the constraint operator, descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl SymmetryBasis {
    /// Smallest kept over largest discarded singular value; `None` when one
    /// of the two sets is empty.
    pub fn spectral_gap(&self) -> Option<f64> {
        let r = SYM_DIM - self.dimension;
        if r == 0 || r == SYM_DIM {
            return None;
        }
        Some(self.singular_values[r - 1] / self.singular_values[r].max(f64::MIN_POSITIVE))
    }
}

/// The 10×10 matrix of `M ↦ {H, S_M}` in the coordinates of
/// [`BilinearForm::to_vec`].
pub fn constraint_operator(p: &NCParams) -> DMatrix<f64> {
    let h = oscillator_form(p);
    let mut l = DMatrix::zeros(SYM_DIM, SYM_DIM);
    for k in 0..SYM_DIM {
        let e = BilinearForm::from_vec(&SVector::<f64, SYM_DIM>::from_fn(|i, _| (i == k) as u8 as f64));
        let col = h.bracket(&e, p.theta).to_vec();
        l.set_column(k, &col);
    }
    l
}

/// Orthonormal basis of bilinear constants of motion of the oscillator.
pub fn conserved_bilinears(p: &NCParams, svd_threshold: f64) -> Result<SymmetryBasis> {
    p.require_oscillator()?;
    if !(svd_threshold > 0.0) {
        return domain("svd threshold must be positive");
    }
    let l = constraint_operator(p);
    let svd = l.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..SYM_DIM).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let cutoff = svd_threshold * sv[0].max(f64::MIN_POSITIVE);
    let mut forms = Vec::new();
    for (&i, &s) in order.iter().zip(&sv) {
        if s <= cutoff {
            let row = v_t.row(i).transpose();
            forms.push(BilinearForm::from_vec(&SVector::<f64, SYM_DIM>::from_column_slice(row.as_slice())));
        }
    }
    Ok(SymmetryBasis {
        dimension: forms.len(),
        forms,
        singular_values: sv,
        threshold: svd_threshold,
    })
}

fn project(target: &SVector<f64, SYM_DIM>, basis: &[BilinearForm]) -> (DVector<f64>, f64) {
    let a = DMatrix::from_fn(SYM_DIM, basis.len(), |i, j| basis[j].to_vec()[i]);
    let b = DVector::from_column_slice(target.as_slice());
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .expect("full SVD");
    let resid = (&a * &coeffs - b).norm();
    (coeffs, resid)
}

/// `‖S − P S‖_F / ‖S‖_F` with `P` the projector onto `span(basis)`.
pub fn membership_check(s: &BilinearForm, basis: &SymmetryBasis) -> Result<f64> {
    if basis.forms.is_empty() {
        return domain("membership check against an empty basis");
    }
    let n = s.norm();
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(project(&s.to_vec(), &basis.forms).1 / n)
}

/// `c[i][j][k]` with `{S_i, S_j} = Σ_k c_ijk S_k`, plus the out-of-span
/// Frobenius residual for each pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureConstants {
    pub c: Vec<Vec<Vec<f64>>>,
    pub residual: Vec<Vec<f64>>,
}

impl StructureConstants {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn structure_constants(basis: &[BilinearForm], p: &NCParams) -> StructureConstants {
    let n = basis.len();
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    let mut residual = vec![vec![0.0; n]; n];
    if n == 0 {
        return StructureConstants { c, residual };
    }
    for i in 0..n {
        for j in 0..n {
            let b = basis[i].bracket(&basis[j], p.theta);
            let (coeffs, r) = project(&b.to_vec(), basis);
            for k in 0..n {
                c[i][j][k] = coeffs[k];
            }
            residual[i][j] = r;
        }
    }
    StructureConstants { c, residual }
}

/// `S₁² + S₂² + S₃² − H²/4ω²` at `z`.
pub fn casimir_residual(p: &NCParams, z: [f64; 4]) -> f64 {
    let [s1, s2, s3] = su2_forms(p).map(|s| s.value_at(z));
    let h = oscillator_form(p).value_at(z);
    s1 * s1 + s2 * s2 + s3 * s3 - h * h / (4.0 * p.omega * p.omega)
}
