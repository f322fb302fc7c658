//! Decompositions whose members after the first all have vanishing
//! G-concurrence, built from two-vector rotations.
//!
//! For coefficient matrices `X₁` (invertible) and `X₂`, `det(X₁ + λX₂)` is a
//! polynomial of degree `d` in `λ`; at a root the combination `X₁ + λX₂` is
//! singular. Rotating the pair by the corresponding 2×2 unitary keeps the
//! sum of projectors and produces one singular member.

use crate::linalg::{self, ComplexMatrix, C64};
use crate::state::{bipartite_reshape, Decomposition, DensityMatrix, PureState};
use crate::{Error, Result};

/// Scaled determinants below this count as zero.
pub const TAU_DET: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PairRotation {
    /// Member with singular coefficient matrix.
    pub w: PureState,
    /// The other rotated member.
    pub y: PureState,
    /// Root of `det(X₁ + λX₂)`; `None` when `x2` was already singular.
    pub lambda: Option<C64>,
}

fn square_matrix(psi: &PureState) -> Result<ComplexMatrix> {
    let (x, _) = bipartite_reshape(psi)?;
    if !x.is_square() {
        return Err(Error::BadShape(format!("expected C^d⊗C^d, got dims {:?}", psi.dims())));
    }
    Ok(x)
}

fn combine(a: C64, x1: &PureState, b: C64, x2: &PureState) -> PureState {
    let v = x1.amplitudes() * a + x2.amplitudes() * b;
    PureState::from_vector(v, x1.dims().to_vec())
}

/// Rotate `(x1, x2)` into `(w, y)` with `det(W) = 0` and
/// `|x1⟩⟨x1| + |x2⟩⟨x2| = |y⟩⟨y| + |w⟩⟨w|`, using the smallest-modulus root.
pub fn pair_rotation(x1: &PureState, x2: &PureState) -> Result<PairRotation> {
    if x1.dims() != x2.dims() {
        return Err(Error::BadShape(format!("dims {:?} vs {:?}", x1.dims(), x2.dims())));
    }
    let m1 = square_matrix(x1)?;
    let m2 = square_matrix(x2)?;
    let d1 = linalg::scaled_det(&m1);
    if !(d1 >= TAU_DET) {
        return Err(Error::PivotSingular(d1));
    }
    if linalg::scaled_det(&m2) < TAU_DET {
        return Ok(PairRotation { w: x2.clone(), y: x1.clone(), lambda: None });
    }
    let inv = linalg::inverse(&m2).ok_or_else(|| Error::Numeric("singular X₂ above tolerance".into()))?;
    let roots = linalg::eigenvalues(&(inv * &m1))?;
    let lambda = -roots
        .into_iter()
        .min_by(|p, q| p.norm().total_cmp(&q.norm()))
        .expect("d >= 1");
    let n = (1.0 + lambda.norm_sqr()).sqrt();
    let a = C64::new(1.0 / n, 0.0);
    let b = lambda / n;
    let w = combine(a, x1, b, x2);
    let y = combine(b.conj(), x1, -a.conj(), x2);
    Ok(PairRotation { w, y, lambda: Some(lambda) })
}

/// Decomposition of `rho` into `rank(rho)` vectors where every member
/// after the first has a singular coefficient matrix.
pub fn zero_g_tail(rho: &DensityMatrix) -> Result<Decomposition> {
    let dims = rho.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::BadShape(format!("expected C^d⊗C^d, got dims {dims:?}")));
    }
    let mut rest = Decomposition::spectral(rho)?.into_vectors();
    let dets: Vec<f64> = rest.iter().map(|v| square_matrix(v).map(|x| linalg::scaled_det(&x))).collect::<Result<_>>()?;
    // Best-conditioned pivot first.
    let (p, &best) = dets.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("rank >= 1");
    if best < TAU_DET {
        return Err(Error::AllSingular);
    }
    let mut pivot = rest.remove(p);
    let mut tail = Vec::with_capacity(rest.len());
    let mut pending = rest.into_iter();
    let mut next_pivot: Vec<PureState> = Vec::new();
    loop {
        let Some(next) = next_pivot.pop().or_else(|| pending.next()) else { break };
        let rot = pair_rotation(&pivot, &next)?;
        tail.push(rot.w);
        let y_det = linalg::scaled_det(&square_matrix(&rot.y)?);
        if y_det >= TAU_DET {
            pivot = rot.y;
            continue;
        }
        // The rotated partner is itself singular: retire it and promote the
        // next remaining vector with an invertible coefficient matrix.
        tail.push(rot.y);
        let mut promoted = None;
        for v in pending.by_ref() {
            if linalg::scaled_det(&square_matrix(&v)?) >= TAU_DET {
                promoted = Some(v);
                break;
            }
            tail.push(v);
        }
        match promoted {
            Some(v) => pivot = v,
            None => {
                // Everything is singular; any member may lead.
                let lead = tail.pop().expect("tail holds y");
                tail.insert(0, lead);
                return Decomposition::new(tail);
            }
        }
    }
    let mut out = vec![pivot];
    out.extend(tail);
    Decomposition::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity};
    use crate::sample;

    fn det_of(v: &PureState) -> f64 {
        bipartite_reshape(v).unwrap().0.determinant().norm()
    }

    #[test]
    fn smallest_root_for_diagonal_pair() {
        let x1 = PureState::from_matrix(&identity(2));
        let x2 = PureState::from_matrix(&diag(&[1.0, 2.0]));
        let rot = pair_rotation(&x1, &x2).unwrap();
        assert!((rot.lambda.unwrap() - C64::new(-0.5, 0.0)).norm() < 1e-12);
        assert!(det_of(&rot.w) < 1e-14);
    }

    #[test]
    fn singular_partner_is_returned_unchanged() {
        let x1 = sample::haar_pure(&[2, 2], 1).unwrap();
        let x2 = sample::haar_pure(&[2], 2).unwrap().tensor(&sample::haar_pure(&[2], 3).unwrap());
        let rot = pair_rotation(&x1, &x2).unwrap();
        assert_eq!(rot.w, x2);
        assert_eq!(rot.y, x1);
        assert!(rot.lambda.is_none());
        assert!(matches!(pair_rotation(&x2, &x1), Err(Error::PivotSingular(_))));
    }

    #[test]
    fn gram_identity_on_random_pairs() {
        for seed in 0..50 {
            let dims = if seed % 2 == 0 { [2, 2] } else { [3, 3] };
            let x1 = sample::haar_pure(&dims, 2 * seed).unwrap();
            let x2 = sample::haar_pure(&dims, 2 * seed + 1).unwrap().scaled(C64::new(0.7, 0.2));
            let rot = pair_rotation(&x1, &x2).unwrap();
            let before = x1.projector() + x2.projector();
            let after = rot.w.projector() + rot.y.projector();
            assert!((before - after).norm() < 1e-12);
            assert!(det_of(&rot.w) < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn zero_tail_examples() {
        let psi = sample::haar_pure(&[2, 2], 5).unwrap();
        let dec = zero_g_tail(&psi.density().unwrap()).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.vectors()[0].projector() - psi.projector()).norm() < 1e-12);

        for (dims, rank, seed) in [([2, 2], 2, 7), ([2, 2], 4, 8), ([3, 3], 4, 9), ([3, 3], 9, 10)] {
            let rho = sample::hs_density(&dims, rank, seed).unwrap();
            let dec = zero_g_tail(&rho).unwrap();
            assert_eq!(dec.len(), rank);
            assert!(dec.reconstruction_error(&rho) < 1e-10);
            for v in &dec.vectors()[1..] {
                assert!(det_of(v) < 1e-10, "{dims:?} rank {rank}: {}", det_of(v));
            }
        }
    }

    #[test]
    fn separable_mixture_has_no_pivot() {
        let a = PureState::basis(&[0, 0], vec![2, 2]).unwrap().density().unwrap();
        let b = PureState::basis(&[1, 1], vec![2, 2]).unwrap().density().unwrap();
        let rho = DensityMatrix::mixture(&[(0.3, &a), (0.7, &b)]).unwrap();
        assert!(matches!(zero_g_tail(&rho), Err(Error::AllSingular)));
    }
}
