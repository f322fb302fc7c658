//! Pure states, density matrices, bipartitions and subsystem reductions.
//!
//! Subsystems are ordered most-significant first: the amplitude index of
//! `|i_0 i_1 ... i_{n-1}>` is `((i_0 d_1 + i_1) d_2 + i_2) ...`, matching
//! the Kronecker product convention of [`tensor`](crate::linalg::tensor).

use std::fmt;
use std::str::FromStr;

use crate::linalg::{self, ComplexMatrix, ComplexVector, HermEigen, C64, ZERO};
use crate::{Error, Result, Tolerances};

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets of every multi-index over `subsystems`, in row-major order of those subsystems.
fn offsets(dims: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &k in subsystems {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &base in &out {
            for digit in 0..dims[k] {
                next.push(base + digit * st[k]);
            }
        }
        out = next;
    }
    out
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::BadShape(format!("invalid dimension list {dims:?}")));
    }
    Ok(())
}

fn check_index(index: usize, subsystems: usize) -> Result<()> {
    if index >= subsystems {
        return Err(Error::IndexOutOfRange { index, subsystems });
    }
    Ok(())
}

/// A state vector on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
    dims: Vec<usize>,
    normalized: bool,
}

impl PureState {
    /// A normalized state; the squared norm must be one within `τ_tr`.
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        let s = Self::raw(amplitudes, dims)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > Tolerances::default().trace {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { normalized: true, ..s })
    }

    /// A subnormalized state (squared norm at most one).
    pub fn subnormalized(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        let s = Self::raw(amplitudes, dims)?;
        let n2 = s.norm_sqr();
        if n2 > 1.0 + Tolerances::default().trace {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// An arbitrary vector with no norm contract; used for unnormalized
    /// algebra such as the matrix isomorphism and decomposition pivots.
    pub fn unnormalized(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        Self::raw(amplitudes, dims)
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalize(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        let mut s = Self::raw(amplitudes, dims)?;
        let n = s.amplitudes.norm();
        if !(n > 0.0) {
            return Err(Error::NotNormalized(0.0));
        }
        s.amplitudes.unscale_mut(n);
        s.normalized = true;
        Ok(s)
    }

    fn raw(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        if total_dim(&dims) != amplitudes.len() {
            return Err(Error::BadShape(format!(
                "{} amplitudes for dims {dims:?}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("finite amplitudes".into()));
        }
        Ok(Self { amplitudes: ComplexVector::from_vec(amplitudes), dims, normalized: false })
    }

    pub(crate) fn from_vector(amplitudes: ComplexVector, dims: Vec<usize>) -> Self {
        debug_assert_eq!(amplitudes.len(), total_dim(&dims));
        Self { amplitudes, dims, normalized: false }
    }

    /// Computational basis state `|digits>`.
    pub fn basis(digits: &[usize], dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(&i, &d)| i >= d) {
            return Err(Error::BadShape(format!("basis digits {digits:?} for dims {dims:?}")));
        }
        let st = strides(&dims);
        let idx: usize = digits.iter().zip(&st).map(|(i, s)| i * s).sum();
        let mut amps = vec![ZERO; total_dim(&dims)];
        amps[idx] = C64::new(1.0, 0.0);
        Self::new(amps, dims)
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Whether this state was constructed under the normalized contract.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `c |ψ>`; the result carries no normalization contract.
    pub fn scaled(&self, c: C64) -> Self {
        Self::from_vector(&self.amplitudes * c, self.dims.clone())
    }

    /// Unit vector along this state.
    pub fn normalized(&self) -> Result<Self> {
        Self::normalize(self.amplitudes.as_slice().to_vec(), self.dims.clone())
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Density matrix of a normalized state.
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.projector(), self.dims.clone())
    }

    /// `|ψ> ⊗ |φ>`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut s = Self::from_vector(amps, dims);
        s.normalized = self.normalized && other.normalized;
        s
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Reorder subsystems so that new subsystem `k` is old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<PureState> {
        check_permutation(order, self.dims.len())?;
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let src = offsets(&self.dims, order);
        let amps = ComplexVector::from_iterator(src.len(), src.iter().map(|&i| self.amplitudes[i]));
        let mut s = Self::from_vector(amps, new_dims);
        s.normalized = self.normalized;
        Ok(s)
    }

    /// Coefficient matrix `X` of the state across a cut: rows index the left
    /// group, columns the right group, so that `|ψ> = (X ⊗ I) Σ_i |ii>`
    /// when the two sides have equal dimension.
    pub fn cut_matrix(&self, cut: &Cut) -> Result<ComplexMatrix> {
        cut.validate(self.dims.len())?;
        let rows = offsets(&self.dims, &cut.left);
        let cols = offsets(&self.dims, &cut.right);
        Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |a, b| self.amplitudes[rows[a] + cols[b]]))
    }

    /// Inverse of [`bipartite_reshape`]: the vector `(X ⊗ I)|φ+>`, i.e. `X` read row-major.
    pub fn from_matrix(x: &ComplexMatrix) -> PureState {
        let (r, c) = x.shape();
        let amps = ComplexVector::from_fn(r * c, |i, _| x[(i / c, i % c)]);
        Self::from_vector(amps, vec![r, c])
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::BadShape(format!("permutation {order:?} of {n} subsystems")));
    }
    for &k in order {
        check_index(k, n)?;
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::BadShape(format!("repeated subsystem {k} in {order:?}")));
        }
    }
    Ok(())
}

/// Matrix `X` and descending Schmidt coefficients (singular values of `X`)
/// of a two-factor state.
pub fn bipartite_reshape(psi: &PureState) -> Result<(ComplexMatrix, Vec<f64>)> {
    if psi.dims.len() != 2 {
        return Err(Error::BadShape(format!("expected two factors, got dims {:?}", psi.dims)));
    }
    let x = psi.cut_matrix(&Cut::new(vec![0], vec![1]))?;
    let schmidt = linalg::singular_values(&x);
    Ok((x, schmidt))
}

/// A density operator on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validate with the default tolerances.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(matrix, dims, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        check_dims(&dims)?;
        let n = total_dim(&dims);
        if matrix.shape() != (n, n) {
            return Err(Error::BadShape(format!(
                "{}x{} matrix for dims {dims:?}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !linalg::all_finite(&matrix) {
            return Err(Error::InvariantViolation("finite entries".into()));
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > tol.herm {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvariantViolation(format!("trace = {tr}")));
        }
        let min = linalg::herm_eig_tol(&matrix, tol.herm)?.min_value();
        if min < -tol.psd {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix, dims })
    }

    /// Skip validation for matrices that are valid by construction
    /// (reductions, mixtures and products of valid states).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), total_dim(&dims));
        Self { matrix, dims }
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let n = total_dim(&dims);
        Ok(Self::new_unchecked(linalg::identity(n) / C64::new(n as f64, 0.0), dims))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Same matrix, different grouping of subsystems (total dimension must agree).
    pub fn regroup(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        if total_dim(&dims) != self.dim() {
            return Err(Error::BadShape(format!("cannot regroup {:?} as {dims:?}", self.dims)));
        }
        Ok(Self::new_unchecked(self.matrix.clone(), dims))
    }

    pub fn eig(&self) -> Result<HermEigen> {
        linalg::herm_eig(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.norm_squared()
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self.eig()?.values.iter().filter(|&&l| l > tol).count())
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new_unchecked(linalg::tensor(&self.matrix, &other.matrix), dims)
    }

    /// `Σ_j p_j ρ_j` for states with identical dims and weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::BadSpec("empty mixture".into()))?.1;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        let mut total = 0.0;
        for (p, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::BadShape("mixture of states with different dims".into()));
            }
            if *p < 0.0 {
                return Err(Error::BadSpec(format!("negative weight {p}")));
            }
            acc += rho.matrix() * C64::new(*p, 0.0);
            total += p;
        }
        if (total - 1.0).abs() > Tolerances::default().trace {
            return Err(Error::BadSpec(format!("weights sum to {total}")));
        }
        Ok(Self::new_unchecked(acc, first.dims.clone()))
    }

    /// Reduced state on `keep`, listed in original relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.dims.len();
        for &k in keep {
            check_index(k, n)?;
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() == n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
        let ko = offsets(&self.dims, &kept);
        let to = offsets(&self.dims, &traced);
        let out = ComplexMatrix::from_fn(ko.len(), ko.len(), |a, b| {
            to.iter().map(|&t| self.matrix[(ko[a] + t, ko[b] + t)]).sum()
        });
        let dims = if kept.is_empty() { vec![1] } else { kept.iter().map(|&k| self.dims[k]).collect() };
        Ok(Self::new_unchecked(out, dims))
    }

    /// Transpose of the factor `subsystem`; the result may fail to be PSD.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        self.partial_transpose_set(&[subsystem])
    }

    /// Transpose on every subsystem in `subsystems`.
    pub fn partial_transpose_set(&self, subsystems: &[usize]) -> Result<ComplexMatrix> {
        let n = self.dims.len();
        for &k in subsystems {
            check_index(k, n)?;
        }
        let st = strides(&self.dims);
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let (mut si, mut sj) = (i, j);
                for &k in subsystems {
                    let di = (i / st[k]) % self.dims[k];
                    let dj = (j / st[k]) % self.dims[k];
                    si = si - di * st[k] + dj * st[k];
                    sj = sj - dj * st[k] + di * st[k];
                }
                out[(i, j)] = self.matrix[(si, sj)];
            }
        }
        Ok(out)
    }

    /// Reorder subsystems so that new subsystem `k` is old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<DensityMatrix> {
        check_permutation(order, self.dims.len())?;
        let idx = offsets(&self.dims, order);
        let m = ComplexMatrix::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])]);
        Ok(Self::new_unchecked(m, order.iter().map(|&k| self.dims[k]).collect()))
    }

    /// Group subsystems as `(left, right)` of a cut, giving a two-factor state.
    pub fn as_bipartite(&self, cut: &Cut) -> Result<DensityMatrix> {
        cut.validate(self.dims.len())?;
        let order: Vec<usize> = cut.left.iter().chain(&cut.right).copied().collect();
        let p = self.permute(&order)?;
        let dl = cut.left.iter().map(|&k| self.dims[k]).product();
        let dr = cut.right.iter().map(|&k| self.dims[k]).product();
        Ok(Self::new_unchecked(p.matrix, vec![dl, dr]))
    }

    /// The dominant eigenvector if the state is pure within `tol` on the purity.
    pub fn as_pure(&self, tol: f64) -> Option<PureState> {
        if self.purity() < 1.0 - tol {
            return None;
        }
        let eig = self.eig().ok()?;
        let v = eig.vectors.column(0).into_owned();
        Some(PureState { amplitudes: v, dims: self.dims.clone(), normalized: true })
    }
}

/// A bipartition of subsystem indices, written `"0,1|2"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Cut {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Self {
        Self { left, right }
    }

    /// `{index} | rest` over `n` subsystems.
    pub fn single(index: usize, n: usize) -> Self {
        Self::new(vec![index], (0..n).filter(|&k| k != index).collect())
    }

    /// The cut `0 | 1` of a two-factor system.
    pub fn two_party() -> Self {
        Self::new(vec![0], vec![1])
    }

    /// Both sides nonempty, disjoint, and covering `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.left.is_empty() || self.right.is_empty() {
            return Err(Error::BadCut(format!("{self}: empty side")));
        }
        let mut seen = vec![false; n];
        for &k in self.left.iter().chain(&self.right) {
            if k >= n {
                return Err(Error::BadCut(format!("{self}: index {k} out of range for {n} subsystems")));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::BadCut(format!("{self}: index {k} repeated")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::BadCut(format!("{self}: does not cover all {n} subsystems")));
        }
        Ok(())
    }

    /// Dimensions of the (left, right) groups.
    pub fn side_dims(&self, dims: &[usize]) -> Result<(usize, usize)> {
        self.validate(dims.len())?;
        Ok((self.left.iter().map(|&k| dims[k]).product(), self.right.iter().map(|&k| dims[k]).product()))
    }

    /// Parse `"i,j|k,l"`; a lone index `"i"` means `{i} | rest` and needs `n`.
    pub fn parse_with(s: &str, n: Option<usize>) -> Result<Self> {
        let list = |part: &str| -> Result<Vec<usize>> {
            part.split(',')
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| Error::BadCut(format!("bad index {t:?} in {s:?}"))))
                .collect()
        };
        match s.split_once('|') {
            Some((l, r)) => Ok(Self::new(list(l)?, list(r)?)),
            None => {
                let left = list(s)?;
                let n = n.ok_or_else(|| Error::BadCut(format!("{s:?} needs the subsystem count")))?;
                let right = (0..n).filter(|k| !left.contains(k)).collect();
                Ok(Self::new(left, right))
            }
        }
    }
}

impl FromStr for Cut {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, None)
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.left), join(&self.right))
    }
}

/// A pure-state ensemble stored as subnormalized vectors `|w_j>` with
/// `ρ = Σ_j |w_j><w_j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    vectors: Vec<PureState>,
}

impl Decomposition {
    /// All vectors must share dims.
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.dims != first.dims) {
                return Err(Error::BadShape("decomposition vectors with different dims".into()));
            }
        } else {
            return Err(Error::BadSpec("empty decomposition".into()));
        }
        Ok(Self { vectors })
    }

    /// Spectral decomposition: `√λ_k |v_k>` for eigenvalues above `1e-14`.
    pub fn spectral(rho: &DensityMatrix) -> Result<Self> {
        let eig = rho.eig()?;
        let dims = rho.dims().to_vec();
        let vectors: Vec<PureState> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > WEIGHT_FLOOR)
            .map(|(k, &l)| PureState::from_vector(eig.vectors.column(k) * C64::new(l.sqrt(), 0.0), dims.clone()))
            .collect();
        Self::new(vectors)
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<PureState> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.vectors[0].dims
    }

    /// Squared norms `p_j`.
    pub fn weights(&self) -> Vec<f64> {
        self.vectors.iter().map(PureState::norm_sqr).collect()
    }

    /// `Σ_j |w_j><w_j|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors[0].dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for v in &self.vectors {
            acc.gerc(C64::new(1.0, 0.0), v.amplitudes(), v.amplitudes(), C64::new(1.0, 0.0));
        }
        acc
    }

    /// Frobenius distance between the reconstruction and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.reconstruct() - rho.matrix()).norm()
    }
}

/// Ensemble members with weight below this are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-14;
