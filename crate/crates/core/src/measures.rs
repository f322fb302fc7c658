//! Pure-state entanglement functionals, negativity and the two-qubit
//! Wootters quantities.
//!
//! Every [`MeasureId`] is evaluated on the spectrum `μ` of the reduced
//! matrix `σ = Tr_B |w><w|` of a possibly subnormalized vector `|w>`. With
//! `s = Σ μ_i = <w|w>`, the evaluator returns `s · E(μ / s)`, a function
//! that is homogeneous of degree one in `μ` (degree two in the amplitudes).
//! For a normalized vector this is just `E`. The convex-roof engine relies on
//! this form: the average of `E` over an ensemble is the plain sum of
//! evaluator values over its subnormalized members.

use std::fmt;
use std::str::FromStr;

use crate::linalg::{self, ComplexMatrix, C64};
use crate::state::{Cut, DensityMatrix, PureState};
use crate::{Error, Result, Tolerances};

const LN2: f64 = std::f64::consts::LN_2;
/// Floor applied to spectral entries inside logarithms and negative powers.
const SPECTRUM_FLOOR: f64 = 1e-300;

/// A pure-state entanglement functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureId {
    /// `√(2(1 − Σ p²))`; equals `2 G` on two qubits.
    Concurrence,
    /// Geometric mean of the Schmidt probabilities over the smaller side.
    GConcurrence,
    /// Von Neumann entropy of the reduced state, in bits.
    Entropy,
    /// Rényi entropy of order `α > 0, α ≠ 1`, in bits.
    Renyi(f64),
    /// Tsallis entropy of order `q > 0, q ≠ 1`.
    Tsallis(f64),
}

impl MeasureId {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MeasureId::Renyi(a) | MeasureId::Tsallis(a) if !(a > 0.0) || a == 1.0 || !a.is_finite() => {
                Err(Error::OutOfRange { value: a, range: "(0, 1) ∪ (1, ∞)" })
            }
            _ => Ok(()),
        }
    }

    /// Degree of homogeneity in the amplitudes: `E(c w) = |c|^2 E(w)`.
    pub const fn homogeneity_degree(&self) -> u32 {
        2
    }

    /// `s · E(μ/s)` for the (unnormalized) reduced spectrum `μ`.
    pub fn weighted(&self, mu: &[f64]) -> f64 {
        let s: f64 = mu.iter().map(|m| m.max(0.0)).sum();
        // A one-dimensional side carries no entanglement.
        if !(s > 0.0) || mu.len() < 2 {
            return 0.0;
        }
        let a = mu.len() as f64;
        let mu = mu.iter().map(|m| m.max(0.0));
        match *self {
            MeasureId::Concurrence => {
                // 2(s² − Σμ²) = 4 Σ_{i<j} μ_i μ_j, summed without cancellation.
                let mu: Vec<f64> = mu.collect();
                let mut pairs = 0.0;
                for i in 0..mu.len() {
                    for j in i + 1..mu.len() {
                        pairs += mu[i] * mu[j];
                    }
                }
                2.0 * pairs.sqrt()
            }
            MeasureId::GConcurrence => {
                let prod: f64 = mu.product();
                prod.powf(1.0 / a)
            }
            MeasureId::Entropy => mu.filter(|&m| m > 0.0).fold(0.0, |acc, m| acc + m * (s / m).log2()),
            MeasureId::Renyi(alpha) => {
                let p: f64 = mu.map(|m| m.powf(alpha)).sum();
                s / (1.0 - alpha) * (p.log2() - alpha * s.log2())
            }
            MeasureId::Tsallis(q) => {
                let p: f64 = mu.map(|m| m.powf(q)).sum();
                (s - s.powf(1.0 - q) * p) / (q - 1.0)
            }
        }
    }

    /// Value and partial derivatives `∂/∂μ_i` of [`weighted`](Self::weighted).
    ///
    /// At spectral points where the functional is not differentiable the
    /// returned vector is a finite one-sided surrogate.
    pub fn weighted_grad(&self, mu: &[f64], grad: &mut [f64]) -> f64 {
        debug_assert_eq!(mu.len(), grad.len());
        let s: f64 = mu.iter().map(|m| m.max(0.0)).sum();
        if !(s > 0.0) || mu.len() < 2 {
            grad.iter_mut().for_each(|g| *g = 0.0);
            return 0.0;
        }
        let clamp = |m: f64| m.max(SPECTRUM_FLOOR);
        match *self {
            MeasureId::Concurrence => {
                let f = self.weighted(mu);
                for (g, &m) in grad.iter_mut().zip(mu) {
                    *g = if f > 0.0 { 2.0 * (s - m.max(0.0)) / f } else { 0.0 };
                }
                f
            }
            MeasureId::GConcurrence => {
                let f = self.weighted(mu);
                let a = mu.len() as f64;
                for (g, &m) in grad.iter_mut().zip(mu) {
                    *g = if f > 0.0 { f / (a * clamp(m)) } else { 0.0 };
                }
                f
            }
            MeasureId::Entropy => {
                for (g, &m) in grad.iter_mut().zip(mu) {
                    *g = (s / clamp(m)).log2();
                }
                self.weighted(mu)
            }
            MeasureId::Renyi(alpha) => {
                let p: f64 = mu.iter().map(|&m| clamp(m).powf(alpha)).sum();
                let base = (p.log2() - alpha * s.log2()) / (1.0 - alpha);
                for (g, &m) in grad.iter_mut().zip(mu) {
                    *g = base + s / (1.0 - alpha) * alpha * (clamp(m).powf(alpha - 1.0) / (p * LN2) - 1.0 / (s * LN2));
                }
                self.weighted(mu)
            }
            MeasureId::Tsallis(q) => {
                let p: f64 = mu.iter().map(|&m| m.max(0.0).powf(q)).sum();
                for (g, &m) in grad.iter_mut().zip(mu) {
                    *g = (1.0 - (1.0 - q) * s.powf(-q) * p - q * s.powf(1.0 - q) * clamp(m).powf(q - 1.0))
                        / (q - 1.0);
                }
                self.weighted(mu)
            }
        }
    }

    /// Largest value on a normalized state whose smaller side has dimension `d`.
    pub fn max_value(&self, d: usize) -> f64 {
        let uniform = vec![1.0 / d as f64; d];
        self.weighted(&uniform)
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureId::Concurrence => write!(f, "concurrence"),
            MeasureId::GConcurrence => write!(f, "g_concurrence"),
            MeasureId::Entropy => write!(f, "entropy"),
            MeasureId::Renyi(a) => write!(f, "renyi:{a}"),
            MeasureId::Tsallis(q) => write!(f, "tsallis:{q}"),
        }
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    /// `concurrence`, `g_concurrence`, `entropy`, `renyi:α`, `tsallis:q`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let parse_param = |p: Option<&str>| -> Result<f64> {
            p.ok_or_else(|| Error::BadSpec(format!("measure {s:?} needs a parameter")))?
                .parse::<f64>()
                .map_err(|_| Error::BadSpec(format!("bad measure parameter in {s:?}")))
        };
        let m = match name {
            "concurrence" | "C" => MeasureId::Concurrence,
            "g_concurrence" | "G" => MeasureId::GConcurrence,
            "entropy" | "E" => MeasureId::Entropy,
            "renyi" => MeasureId::Renyi(parse_param(param)?),
            "tsallis" => MeasureId::Tsallis(parse_param(param)?),
            _ => return Err(Error::BadSpec(format!("unknown measure {s:?}"))),
        };
        m.validate()?;
        Ok(m)
    }
}

/// Spectrum of `X X†` on the smaller side of a coefficient matrix, from its singular values.
pub(crate) fn reduced_spectrum(x: &ComplexMatrix) -> Vec<f64> {
    let a = x.nrows().min(x.ncols());
    let mut sv = linalg::singular_values(x);
    sv.resize(a, 0.0);
    sv.iter().map(|s| s * s).collect()
}

/// Value of `m` on `psi` across `cut`; homogeneous of degree two for
/// subnormalized input.
pub fn pure_measure(m: MeasureId, psi: &PureState, cut: &Cut) -> Result<f64> {
    m.validate()?;
    let x = psi.cut_matrix(cut)?;
    Ok(m.weighted(&reduced_spectrum(&x)))
}

/// Schmidt probabilities of a normalized copy of `psi` across `cut`.
pub fn schmidt_probabilities(psi: &PureState, cut: &Cut) -> Result<Vec<f64>> {
    let mu = reduced_spectrum(&psi.cut_matrix(cut)?);
    let s: f64 = mu.iter().sum();
    Ok(mu.iter().map(|m| m / s).collect())
}

/// `(‖ρ^{T_B}‖₁ − 1)/2`, computed as the magnitude sum of the negative
/// eigenvalues of the partial transpose over the right side of `cut`.
pub fn negativity(rho: &DensityMatrix, cut: &Cut) -> Result<f64> {
    cut.validate(rho.dims().len())?;
    let pt = rho.partial_transpose_set(&cut.right)?;
    let ev = linalg::herm_eigenvalues(&pt)?;
    Ok(ev.iter().filter(|&&l| l < 0.0).fold(0.0, |acc, l| acc - l))
}

/// Closed-form two-qubit concurrence quantities from the Wootters matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WoottersRecord {
    /// Eigenvalues of `R = √(√ρ ρ̃ √ρ)`, descending.
    pub lambdas: [f64; 4],
    /// `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
    pub c_formation: f64,
    /// `λ₁ + λ₂ + λ₃ + λ₄`.
    pub c_assistance: f64,
    /// Number of `λ_i > τ_rank · λ₁`.
    pub r_rank: usize,
}

/// Relative threshold for counting the rank of `R`.
pub const TAU_RANK: f64 = 1e-8;

/// Spin flip `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = linalg::tensor(&linalg::pauli_y(), &linalg::pauli_y());
    &yy * rho.conjugate() * &yy
}

/// Wootters matrix `R = √(√ρ ρ̃ √ρ)` built literally.
pub fn wootters_matrix(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_two_qubit(rho)?;
    let root = linalg::psd_sqrt(rho.matrix())?;
    let inner = &root * spin_flip(rho.matrix()) * &root;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    linalg::psd_sqrt(&inner)
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 || !(rho.dims() == [2, 2] || rho.dims() == [4]) {
        return Err(Error::BadShape(format!("Wootters analysis needs dims [2, 2], got {:?}", rho.dims())));
    }
    Ok(())
}

/// Wootters spectrum and the derived formation/assistance concurrences.
///
/// With `ρ = A A†` (`A = V Λ^{1/2}`), the eigenvalues of `R` are the singular
/// values of the complex-symmetric `τ = Aᵀ (σ_y ⊗ σ_y) A`. They are computed
/// that way so small eigenvalues keep absolute accuracy near machine epsilon
/// instead of its square root.
pub fn wootters_analysis(rho: &DensityMatrix) -> Result<WoottersRecord> {
    check_two_qubit(rho)?;
    let tol = Tolerances::default();
    let eig = rho.eig()?;
    if eig.min_value() < -tol.psd {
        return Err(Error::NotPsd(eig.min_value()));
    }
    let a = ComplexMatrix::from_fn(4, 4, |i, j| eig.vectors[(i, j)] * eig.values[j].max(0.0).sqrt());
    let yy = linalg::tensor(&linalg::pauli_y(), &linalg::pauli_y());
    let tau = a.transpose() * yy * &a;
    let sv = linalg::singular_values(&tau);
    let mut lambdas = [0.0; 4];
    for (l, s) in lambdas.iter_mut().zip(sv) {
        *l = s;
    }
    Ok(record_from_lambdas(lambdas))
}

pub(crate) fn record_from_lambdas(lambdas: [f64; 4]) -> WoottersRecord {
    let c_formation = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    let c_assistance = lambdas.iter().sum();
    let r_rank = lambdas.iter().filter(|&&l| l > TAU_RANK * lambdas[0]).count();
    WoottersRecord { lambdas, c_formation, c_assistance, r_rank }
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// Two-qubit entanglement of formation `h((1 + √(1 − c²))/2)` in ebits.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(c >= -SLACK && c <= 1.0 + SLACK) {
        return Err(Error::OutOfRange { value: c, range: "[0, 1]" });
    }
    let c = c.clamp(0.0, 1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

/// `−Σ λ log₂ λ` over the spectrum, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let ev = rho.eig()?.values;
    let min = ev.last().copied().unwrap_or(0.0);
    if min < -Tolerances::default().psd {
        return Err(Error::NotPsd(min));
    }
    Ok(ev.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum::<f64>().max(0.0))
}
