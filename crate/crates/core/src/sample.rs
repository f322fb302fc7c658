//! Seed-deterministic random states and matrices.
//!
//! Every sampler takes an explicit 64-bit seed (or an RNG derived from one);
//! equal seeds give bit-identical output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::state::{DensityMatrix, PureState};
use crate::{Error, Result};

/// Seed used by verification suites when none is given.
pub const DEFAULT_SEED: u64 = 20_140_613;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent child seed for stream `index` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex normal: real and imaginary parts `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre_with<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    // Fill row-major so the draw order does not depend on storage layout.
    let entries: Vec<C64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_row_slice(rows, cols, &entries)
}

/// `rows × cols` matrix of i.i.d. standard complex normals.
pub fn ginibre(rows: usize, cols: usize, seed: u64) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::BadShape(format!("ginibre {rows}x{cols}")));
    }
    Ok(ginibre_with(&mut rng(seed), rows, cols))
}

pub fn haar_pure_with<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<PureState> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || n == 0 {
        return Err(Error::BadShape(format!("haar_pure dims {dims:?}")));
    }
    let amps: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    PureState::normalize(amps, dims.to_vec())
}

/// Haar-random normalized pure state.
pub fn haar_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    haar_pure_with(&mut rng(seed), dims)
}

pub fn hs_density_with<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], rank: usize) -> Result<DensityMatrix> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || n == 0 || rank == 0 || rank > n {
        return Err(Error::BadShape(format!("hs_density dims {dims:?} rank {rank}")));
    }
    // Reduced state of a Haar vector on (system ⊗ rank-dimensional environment).
    let g = ginibre_with(rng, n, rank);
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m.unscale_mut(tr);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(m, dims.to_vec())
}

/// Random density matrix of rank `rank` from the induced measure.
pub fn hs_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    hs_density_with(&mut rng(seed), dims, rank)
}

pub fn isometry_with<R: Rng + ?Sized>(rng: &mut R, m: usize, r: usize) -> Result<ComplexMatrix> {
    if r == 0 || m < r {
        return Err(Error::BadShape(format!("isometry {m}x{r}")));
    }
    loop {
        let mut g = ginibre_with(rng, m, r);
        if linalg::orthonormalize_columns(&mut g) {
            return Ok(g);
        }
    }
}

/// `m × r` isometry (`U†U = I_r`) from Gram–Schmidt on a Ginibre matrix.
///
/// The positive-diagonal QR convention makes the output a deterministic
/// function of the seed.
pub fn isometry(m: usize, r: usize, seed: u64) -> Result<ComplexMatrix> {
    isometry_with(&mut rng(seed), m, r)
}

/// Haar unitary of size `n`.
pub fn unitary_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<ComplexMatrix> {
    isometry_with(rng, n, n)
}

/// Random point on the unit sphere of `C^n` as a plain vector.
pub fn unit_vector_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    let v = ComplexVector::from_iterator(n, (0..n).map(|_| complex_normal(rng)));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// What to sample, with its shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleKind {
    HaarPure { dims: Vec<usize> },
    HsDensity { dims: Vec<usize>, rank: usize },
    Isometry { rows: usize, cols: usize },
    Ginibre { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampled {
    Pure(PureState),
    Density(DensityMatrix),
    Matrix(ComplexMatrix),
}

/// Dispatch over [`SampleKind`].
pub fn sample(kind: &SampleKind, seed: u64) -> Result<Sampled> {
    Ok(match kind {
        SampleKind::HaarPure { dims } => Sampled::Pure(haar_pure(dims, seed)?),
        SampleKind::HsDensity { dims, rank } => Sampled::Density(hs_density(dims, *rank, seed)?),
        SampleKind::Isometry { rows, cols } => Sampled::Matrix(isometry(*rows, *cols, seed)?),
        SampleKind::Ginibre { rows, cols } => Sampled::Matrix(ginibre(*rows, *cols, seed)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_pure_is_normalized() {
        for seed in 0..20 {
            let psi = haar_pure(&[2], seed).unwrap();
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isometry_property() {
        let u = isometry(4, 2, 7).unwrap();
        assert!(linalg::isometry_error(&u) < 1e-12);
        assert!(isometry(2, 3, 7).is_err());
    }

    #[test]
    fn hs_density_rank_is_forced() {
        let rho = hs_density(&[2, 2], 2, 11).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        let ev = rho.eig().unwrap().values;
        assert_eq!(ev.iter().filter(|&&l| l > 1e-12).count(), 2);
        assert!(hs_density(&[2, 2], 5, 11).is_err());
    }

    #[test]
    fn same_seed_same_bits() {
        for kind in [
            SampleKind::HaarPure { dims: vec![2, 3] },
            SampleKind::HsDensity { dims: vec![2, 2], rank: 3 },
            SampleKind::Isometry { rows: 5, cols: 3 },
            SampleKind::Ginibre { rows: 2, cols: 4 },
        ] {
            assert_eq!(sample(&kind, 42).unwrap(), sample(&kind, 42).unwrap());
            assert_ne!(sample(&kind, 42).unwrap(), sample(&kind, 43).unwrap());
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(5, i)).collect();
        assert_eq!(s.len(), 1000);
    }
}
