//! Dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::{Error, Result, Tolerances};

/// Dense complex matrix, row/column indexed, the universal numeric carrier.
pub type ComplexMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Build a matrix from row-major entries.
pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(rows, cols, entries)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    from_rows(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    from_rows(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    diag(&[1.0, -1.0])
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Largest entrywise modulus of `h - h†`.
pub fn hermiticity_error(h: &ComplexMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermEigen {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Apply a scalar function to the spectrum: `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.nrows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * C64::new(w, 0.0);
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending.
///
/// Ties keep the order produced by the underlying routine.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEigen> {
    herm_eig_tol(h, Tolerances::default().herm)
}

pub fn herm_eig_tol(h: &ComplexMatrix, tol_herm: f64) -> Result<HermEigen> {
    if !h.is_square() {
        return Err(Error::BadShape(format!("{}x{} matrix is not square", h.nrows(), h.ncols())));
    }
    let dev = hermiticity_error(h);
    if !(dev <= tol_herm) {
        return Err(Error::NotHermitian(dev));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(h.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn herm_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(h)?.values)
}

/// Principal square root of a positive semidefinite matrix.
///
/// Negative eigenvalues no larger in magnitude than `τ_psd` are clipped to
/// zero, as are positive ones at the round-off level of the eigensolver.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let tol = Tolerances::default();
    let eig = herm_eig_tol(p, tol.herm)?;
    let min = eig.min_value();
    if min < -tol.psd {
        return Err(Error::NotPsd(min));
    }
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let noise = 4.0 * f64::EPSILON * top * p.nrows() as f64;
    Ok(eig.map(|x| if x > noise { x.sqrt() } else { 0.0 }))
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().sum()
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Eigenvalues of a general square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::BadShape("eigenvalues of a non-square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// `|det m| / ‖m‖_F^d`, zero for the zero matrix.
pub fn scaled_det(m: &ComplexMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m / C64::new(norm, 0.0)).determinant().norm()
}

/// Largest entrywise modulus of `u†u - I`.
pub fn isometry_error(u: &ComplexMatrix) -> f64 {
    let gram = u.adjoint() * u;
    let id = identity(u.ncols());
    (gram - id).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Modified Gram–Schmidt on the columns, in place.
///
/// Each column is normalized after removing its projection on the previous
/// ones, which fixes the phase so that the triangular factor has a positive
/// real diagonal. Returns `false` if a column becomes numerically dependent.
pub fn orthonormalize_columns(m: &mut ComplexMatrix) -> bool {
    let cols = m.ncols();
    for j in 0..cols {
        for k in 0..j {
            let (prev, mut cur) = m.columns_range_pair_mut(k, j);
            let overlap = prev.dotc(&cur);
            cur.axpy(-overlap, &prev, ONE);
        }
        let norm = m.column(j).norm();
        if !(norm > 1e-300) {
            return false;
        }
        m.column_mut(j).scale_mut(1.0 / norm);
    }
    true
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    m.clone().try_inverse()
}
