//! Generators and checks for states whose formation and assistance values coincide.
//!
//! A two-party state on `C^d ⊗ C^d` whose support is `X·K` with
//! `K = span{I} ⊕ N` (`N` a space of nilpotent matrices) has the same
//! G-concurrence average on every decomposition: each member `X(aI + N)`
//! has `|det| = |det X|·|a|^d`.

use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::measures::TAU_RANK;
use crate::roof::TAU_DET;
use crate::sample;
use crate::state::{Cut, DensityMatrix, PureState};
use crate::{Error, Result};

/// Default tolerance for [`is_nilpotent`].
pub const TAU_NIL: f64 = 1e-9;

/// Largest condition number accepted for a random conjugator.
const MAX_CONDITION: f64 = 1e3;

/// The two nilpotency tests on `n / ‖n‖_F`: the characteristic polynomial
/// is `t^d` (coefficients from the Schur eigenvalues) and `n^d = 0`.
///
/// Eigenvalue moduli themselves are not compared: a rounded nilpotent block
/// of size `d` has eigenvalues of order `ε^{1/d}`, while the polynomial
/// coefficients stay of order `ε`.
pub fn nilpotency_checks(n: &ComplexMatrix, tol: f64) -> (bool, bool) {
    if !n.is_square() {
        return (false, false);
    }
    let d = n.nrows();
    let norm = n.norm();
    if norm == 0.0 {
        return (true, true);
    }
    let m = n / C64::new(norm, 0.0);
    let by_poly = match linalg::eigenvalues(&m) {
        Ok(ev) => {
            // Elementary symmetric polynomials e_1..e_d of the eigenvalues.
            let mut e = vec![C64::new(0.0, 0.0); d + 1];
            e[0] = C64::new(1.0, 0.0);
            for (i, l) in ev.iter().enumerate() {
                for k in (1..=i + 1).rev() {
                    let prev = e[k - 1];
                    e[k] += prev * l;
                }
            }
            e[1..].iter().all(|c| c.norm() < tol)
        }
        Err(_) => false,
    };
    let mut p = m.clone();
    for _ in 1..d {
        p = &p * &m;
    }
    (by_poly, p.norm() < tol)
}

/// Both [`nilpotency_checks`] pass.
pub fn is_nilpotent(n: &ComplexMatrix, tol: f64) -> bool {
    let (a, b) = nilpotency_checks(n, tol);
    a && b
}

/// Largest dimension of a space of nilpotent `d × d` matrices.
pub fn max_nilpotent_dimension(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentSubspace {
    pub d: usize,
    /// Orthonormal in the Hilbert–Schmidt inner product.
    pub basis: Vec<ComplexMatrix>,
    pub conjugator: Option<ComplexMatrix>,
}

impl NilpotentSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Σ_k coeffs[k] · basis[k]`.
    pub fn combination(&self, coeffs: &[C64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out += b * *c;
        }
        out
    }
}

fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = linalg::singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Random invertible `d × d` matrix with condition number at most 10³.
fn conjugator<R: rand::Rng>(rng: &mut R, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    loop {
        let s = sample::ginibre_with(rng, d, d);
        if condition_number(&s) <= MAX_CONDITION {
            if let Some(inv) = linalg::inverse(&s) {
                return (s, inv);
            }
        }
    }
}

/// Random `k`-dimensional subspace of `S T S⁻¹`, with `T` the strictly
/// upper-triangular matrices and `S` a random well-conditioned conjugator.
pub fn nilpotent_subspace(d: usize, k: usize, seed: u64) -> Result<NilpotentSubspace> {
    if d == 0 {
        return Err(Error::BadShape("dimension 0".into()));
    }
    let max = max_nilpotent_dimension(d);
    if k > max {
        return Err(Error::DimensionTooLarge { requested: k, max });
    }
    let mut rng = sample::rng(seed);
    let (s, s_inv) = conjugator(&mut rng, d);
    loop {
        // Columns of `stack` are the vectorized candidates.
        let mut stack = ComplexMatrix::zeros(d * d, k);
        for col in 0..k {
            let mut t = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in i + 1..d {
                    t[(i, j)] = sample::complex_normal(&mut rng);
                }
            }
            let n = &s * t * &s_inv;
            for (idx, z) in n.iter().enumerate() {
                stack[(idx, col)] = *z;
            }
        }
        if linalg::orthonormalize_columns(&mut stack) {
            let basis = (0..k).map(|col| ComplexMatrix::from_column_slice(d, d, stack.column(col).as_slice())).collect();
            return Ok(NilpotentSubspace { d, basis, conjugator: Some(s) });
        }
    }
}

/// Data for a state with support `X · (span{I} ⊕ N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GMonoSpec {
    pub x: ComplexMatrix,
    pub c: C64,
    /// `Z_2..Z_r`, spanning a nilpotent space.
    pub tail: Vec<ComplexMatrix>,
    /// Optional nilpotent correction of the head, `W_1 = cX + X Z_1`.
    pub z1: Option<ComplexMatrix>,
}

impl GMonoSpec {
    pub fn d(&self) -> usize {
        self.x.nrows()
    }

    /// Number of members `r = 1 + tail length`.
    pub fn rank(&self) -> usize {
        1 + self.tail.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        if !self.x.is_square() || d == 0 {
            return Err(Error::BadSpec("X must be square".into()));
        }
        let det = linalg::scaled_det(&self.x);
        if !(det > TAU_DET) {
            return Err(Error::BadSpec(format!("X is singular (scaled det {det:e})")));
        }
        if !(self.c.norm() > 0.0) {
            return Err(Error::BadSpec("c must be nonzero".into()));
        }
        if self.tail.len() > max_nilpotent_dimension(d) {
            return Err(Error::BadSpec(format!("tail of {} exceeds d(d-1)/2", self.tail.len())));
        }
        for z in self.tail.iter().chain(self.z1.iter()) {
            if z.shape() != (d, d) || !is_nilpotent(z, TAU_NIL) {
                return Err(Error::BadSpec("tail matrices must be nilpotent d×d".into()));
            }
        }
        Ok(())
    }

    /// Random `X`, `c` and an `(r − 1)`-dimensional nilpotent tail.
    pub fn random(d: usize, r: usize, seed: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::BadSpec("r must be at least 1".into()));
        }
        let mut rng = sample::rng(seed);
        let (x, _) = conjugator(&mut rng, d);
        let c = sample::complex_normal(&mut rng);
        let sub = nilpotent_subspace(d, r - 1, sample::derive_seed(seed, 1)).map_err(|e| match e {
            Error::DimensionTooLarge { .. } => Error::BadSpec(format!("r = {r} exceeds 1 + d(d-1)/2")),
            other => other,
        })?;
        Ok(Self { x, c, tail: sub.basis, z1: None })
    }

    fn members(&self) -> Vec<ComplexMatrix> {
        let mut head = &self.x * self.c;
        if let Some(z) = &self.z1 {
            head += &self.x * z;
        }
        std::iter::once(head).chain(self.tail.iter().map(|z| &self.x * z)).collect()
    }
}

fn check_weights(spec: &GMonoSpec, weights: &[f64]) -> Result<()> {
    if weights.len() != spec.rank() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::BadSpec(format!("need {} positive weights", spec.rank())));
    }
    Ok(())
}

/// `Σ_j p_j |W_j⟩⟨W_j|` normalized to unit trace, on `C^d ⊗ C^d`.
pub fn gmono_state(spec: &GMonoSpec, weights: &[f64]) -> Result<DensityMatrix> {
    spec.validate()?;
    check_weights(spec, weights)?;
    let d = spec.d();
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for (w, p) in spec.members().iter().zip(weights) {
        let v = PureState::from_matrix(w);
        acc.gerc(C64::new(*p, 0.0), v.amplitudes(), v.amplitudes(), C64::new(1.0, 0.0));
    }
    let tr = acc.trace().re;
    acc.unscale_mut(tr);
    let acc = (&acc + acc.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(acc, vec![d, d])
}

/// The decomposition-independent G-concurrence average of
/// [`gmono_state`]`(spec, weights)`: `|det X|^{2/d} |c|² p_1 / T`, with `T`
/// the trace before normalization.
pub fn gmono_common_value(spec: &GMonoSpec, weights: &[f64]) -> Result<f64> {
    spec.validate()?;
    check_weights(spec, weights)?;
    let d = spec.d() as f64;
    let trace: f64 = spec.members().iter().zip(weights).map(|(w, p)| p * w.norm_squared()).sum();
    let det = spec.x.determinant().norm();
    Ok(det.powf(2.0 / d) * spec.c.norm_sqr() * weights[0] / trace)
}

/// `λ1|100⟩ + λ2|010⟩ + λ3|001⟩ + λ4|000⟩`.
pub fn w_class_state(lambdas: [C64; 4]) -> Result<PureState> {
    let z = C64::new(0.0, 0.0);
    let [l1, l2, l3, l4] = lambdas;
    PureState::new(vec![l4, l3, l2, z, l1, z, z, z], vec![2, 2, 2])
}

/// [`w_class_state`] with a uniformly random unit `λ ∈ C⁴`.
pub fn random_w_class(seed: u64) -> Result<PureState> {
    let v = sample::unit_vector_with(&mut sample::rng(seed), 4);
    w_class_state([v[0], v[1], v[2], v[3]])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductSplit {
    pub is_product: bool,
    /// `Tr[(ρ^C)²]`.
    pub purity_c: f64,
    /// `(χ^{AB}, φ^C)` when `is_product`.
    pub factors: Option<(PureState, PureState)>,
}

/// Whether `ψ = χ^{AB} ⊗ φ^C`, decided by the purity of `ρ^C` exceeding `1 − tol`.
pub fn product_split_check(psi: &PureState, tol: f64) -> Result<ProductSplit> {
    let dims = psi.dims();
    if dims.len() != 3 {
        return Err(Error::BadShape(format!("expected dims [d_A, d_B, d_C], got {dims:?}")));
    }
    let psi = psi.normalized()?;
    // Rows: AB index, columns: C index.
    let m = psi.cut_matrix(&Cut::new(vec![0, 1], vec![2]))?;
    let rho_c = (m.transpose() * m.conjugate()).transpose();
    let purity_c = rho_c.norm_squared();
    if purity_c <= 1.0 - tol {
        return Ok(ProductSplit { is_product: false, purity_c, factors: None });
    }
    let eig = linalg::herm_eig(&rho_c)?;
    let phi_vec: ComplexVector = eig.vectors.column(0).into_owned();
    let chi_vec = &m * phi_vec.conjugate();
    let chi = PureState::normalize(chi_vec.iter().copied().collect(), vec![dims[0], dims[1]])?;
    let phi = PureState::normalize(phi_vec.iter().copied().collect(), vec![dims[2]])?;
    Ok(ProductSplit { is_product: true, purity_c, factors: Some((chi, phi)) })
}

/// Orthonormal basis of the support of `rho` (eigenvalues above `TAU_RANK · λ_max`).
pub fn support_basis(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eig = rho.eig()?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let k = eig.values.iter().filter(|&&l| l > TAU_RANK * top).count().max(1);
    Ok(eig.vectors.columns(0, k).into_owned())
}

/// `‖(I − Π) σ (I − Π)‖_F` with `Π` the support projector of `rho`.
pub fn support_leakage(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::BadShape("dimension mismatch".into()));
    }
    let v = support_basis(rho)?;
    let q = linalg::identity(rho.dim()) - &v * v.adjoint();
    Ok((&q * sigma.matrix() * &q).norm())
}

/// Random full-rank state on the support of `rho`: `V A A† V† / Tr` with
/// `V` a support basis and `A` Ginibre. Pure `rho` is returned as is.
pub fn sample_in_support(rho: &DensityMatrix, seed: u64) -> Result<DensityMatrix> {
    let v = support_basis(rho)?;
    let k = v.ncols();
    if k == 1 {
        return Ok(rho.clone());
    }
    let a = sample::ginibre(k, k, seed)?;
    let g = &v * a;
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m.unscale_mut(tr);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(m, rho.dims().to_vec())
}
