//! Decomposition average as a differentiable function of the mixing isometry.
//!
//! For root vectors `w_j` (rows of `W`) and an `m × r` isometry `U`, the
//! ensemble members are the rows of `Y = U W`. Each member is reshaped into
//! its `a × b` coefficient matrix `X_k` across the cut (`a ≤ b`), and the
//! objective is `Σ_k F(spec(X_k X_k†))` with `F` the weighted evaluator of a
//! [`MeasureId`]. The Euclidean gradient with respect to `U` (real inner
//! product `Re tr(A†B)`) is `Γ = Gy W†`, where row `k` of `Gy` is
//! `2 ∇F(σ_k) X_k` flattened.

use nalgebra::SymmetricEigen;

use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::measures::MeasureId;
use crate::state::{Cut, Decomposition};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    /// `Σ_k F_k`.
    Sum,
    /// `Σ_k F_k²`; smooth where members vanish, used to polish minima at zero.
    SumOfSquares,
}

pub(crate) struct Objective {
    measure: MeasureId,
    a: usize,
    b: usize,
    roots: ComplexMatrix,
    roots_adj: ComplexMatrix,
}

impl Objective {
    pub(crate) fn new(measure: MeasureId, roots: &Decomposition, cut: &Cut) -> Result<Self> {
        measure.validate()?;
        let (dl, dr) = cut.side_dims(roots.dims())?;
        let (a, b) = if dl <= dr { (dl, dr) } else { (dr, dl) };
        let r = roots.len();
        let mut w = ComplexMatrix::zeros(r, a * b);
        for (j, v) in roots.vectors().iter().enumerate() {
            let mut x = v.cut_matrix(cut)?;
            if dl > dr {
                x = x.transpose();
            }
            for i in 0..a {
                for k in 0..b {
                    w[(j, i * b + k)] = x[(i, k)];
                }
            }
        }
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("non-finite root vector".into()));
        }
        let roots_adj = w.adjoint();
        Ok(Self { measure, a, b, roots: w, roots_adj })
    }

    /// Objective value only.
    pub(crate) fn value(&self, u: &ComplexMatrix, shape: Shape) -> f64 {
        let y = u * &self.roots;
        let mut row = vec![ZERO; self.a * self.b];
        let mut total = 0.0;
        for k in 0..y.nrows() {
            for (d, z) in row.iter_mut().enumerate() {
                *z = y[(k, d)];
            }
            let f = self.term(&row, None);
            total += match shape {
                Shape::Sum => f,
                Shape::SumOfSquares => f * f,
            };
        }
        total
    }

    /// Objective value and Euclidean gradient with respect to `u`.
    pub(crate) fn value_grad(&self, u: &ComplexMatrix, shape: Shape, grad: &mut ComplexMatrix) -> f64 {
        let y = u * &self.roots;
        let ab = self.a * self.b;
        let mut gy = ComplexMatrix::zeros(y.nrows(), ab);
        let mut row = vec![ZERO; ab];
        let mut g = vec![ZERO; ab];
        let mut total = 0.0;
        for k in 0..y.nrows() {
            for (d, z) in row.iter_mut().enumerate() {
                *z = y[(k, d)];
            }
            let f = self.term(&row, Some(&mut g));
            let scale = match shape {
                Shape::Sum => {
                    total += f;
                    1.0
                }
                Shape::SumOfSquares => {
                    total += f * f;
                    2.0 * f
                }
            };
            for (d, z) in g.iter().enumerate() {
                gy[(k, d)] = z * scale;
            }
        }
        *grad = gy * &self.roots_adj;
        total
    }

    /// `F` for one member; writes `2 ∇F(σ) X` into `grad` when requested.
    fn term(&self, x: &[C64], grad: Option<&mut [C64]>) -> f64 {
        match self.a {
            1 => {
                if let Some(g) = grad {
                    g.iter_mut().for_each(|z| *z = ZERO);
                }
                0.0
            }
            2 => self.term_qubit(x, grad),
            _ => self.term_general(x, grad),
        }
    }

    /// Closed form for a two-dimensional smaller side. The determinant is
    /// taken from 2×2 minors of `X` (Cauchy–Binet) so that nearly product
    /// members keep full relative accuracy in the small eigenvalue.
    fn term_qubit(&self, x: &[C64], grad: Option<&mut [C64]>) -> f64 {
        let b = self.b;
        let (r0, r1) = x.split_at(b);
        let p: f64 = r0.iter().map(|z| z.norm_sqr()).sum();
        let q: f64 = r1.iter().map(|z| z.norm_sqr()).sum();
        let s = p + q;
        if !(s > 0.0) {
            if let Some(g) = grad {
                g.iter_mut().for_each(|z| *z = ZERO);
            }
            return 0.0;
        }
        let mut det = 0.0;
        for i in 0..b {
            for j in i + 1..b {
                det += (r0[i] * r1[j] - r0[j] * r1[i]).norm_sqr();
            }
        }
        let mu1 = 0.5 * s + (0.25 * s * s - det).max(0.0).sqrt();
        let mu2 = if mu1 > 0.0 { det / mu1 } else { 0.0 };
        let mu = [mu1, mu2];
        let Some(g) = grad else {
            return self.measure.weighted(&mu);
        };
        let mut dmu = [0.0; 2];
        let f = self.measure.weighted_grad(&mu, &mut dmu);
        // ∇F(σ) = g2 I + (g1 − g2)/(μ1 − μ2) (σ − μ2 I), or the isotropic limit.
        let c: C64 = r0.iter().zip(r1).map(|(u, v)| u * v.conj()).sum();
        let gap = mu1 - mu2;
        let (alpha, beta) = if gap > 1e-10 * s {
            let beta = (dmu[0] - dmu[1]) / gap;
            (dmu[1] - beta * mu2, beta)
        } else {
            (0.5 * (dmu[0] + dmu[1]), 0.0)
        };
        // G = alpha I + beta σ with σ = [[p, c], [c̄, q]].
        let g00 = alpha + beta * p;
        let g11 = alpha + beta * q;
        let g01 = c * beta;
        for k in 0..b {
            g[k] = (r0[k] * g00 + g01 * r1[k]) * 2.0;
            g[b + k] = (g01.conj() * r0[k] + r1[k] * g11) * 2.0;
        }
        f
    }

    fn term_general(&self, x: &[C64], grad: Option<&mut [C64]>) -> f64 {
        let (a, b) = (self.a, self.b);
        let xm = ComplexMatrix::from_row_slice(a, b, x);
        let sigma = &xm * xm.adjoint();
        let eig = SymmetricEigen::new(sigma);
        let mu: Vec<f64> = eig.eigenvalues.iter().map(|m| m.max(0.0)).collect();
        let Some(g) = grad else {
            return self.measure.weighted(&mu);
        };
        let mut dmu = vec![0.0; a];
        let f = self.measure.weighted_grad(&mu, &mut dmu);
        let v = &eig.eigenvectors;
        let gm = ComplexMatrix::from_fn(a, a, |i, j| {
            (0..a).map(|k| v[(i, k)] * v[(j, k)].conj() * dmu[k]).sum::<C64>()
        });
        let out = gm * xm * C64::new(2.0, 0.0);
        for i in 0..a {
            for k in 0..b {
                g[i * b + k] = out[(i, k)];
            }
        }
        f
    }
}
