//! Disentangling condition, power-law monogamy and Markov-type states.
//!
//! Tripartite states carry dims `[d_A, d_B, d_C]`. Marginals are obtained by
//! partial trace; the `A|BC` split regroups the state as `[d_A, d_B·d_C]`.

use rayon::prelude::*;

use crate::linalg::{ComplexMatrix, C64};
use crate::measures::{negativity, pure_measure, von_neumann_entropy, wootters_analysis, MeasureId};
use crate::roof::{roof_optimize, RoofConfig, RoofMode};
use crate::sample;
use crate::state::{Cut, DensityMatrix, PureState};
use crate::{Error, Result};

/// States with purity above `1 − PURE_TOL` are evaluated with pure-state formulas.
const PURE_TOL: f64 = 1e-10;

/// How a bipartite entanglement value is computed.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluator {
    /// Convex roof of a pure-state measure: the pure formula on pure input,
    /// the Wootters closed form for two-qubit (G-)concurrence, otherwise
    /// [`roof_optimize`] in min mode.
    Formation { measure: MeasureId, config: RoofConfig },
    Negativity,
}

impl Evaluator {
    pub fn concurrence() -> Self {
        Evaluator::Formation { measure: MeasureId::Concurrence, config: RoofConfig::default() }
    }

    pub fn formation(measure: MeasureId) -> Self {
        Evaluator::Formation { measure, config: RoofConfig::default() }
    }

    /// Value across the two subsystems of a bipartite `rho`.
    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dims().len() != 2 {
            return Err(Error::BadShape(format!("expected a bipartite state, got dims {:?}", rho.dims())));
        }
        let cut = Cut::two_party();
        match self {
            Evaluator::Negativity => negativity(rho, &cut),
            Evaluator::Formation { measure, config } => {
                if let Some(psi) = rho.as_pure(PURE_TOL) {
                    return pure_measure(*measure, &psi, &cut);
                }
                if rho.dims() == [2, 2] {
                    // Two-qubit closed forms; G is half the concurrence at d = 2.
                    match measure {
                        MeasureId::Concurrence => return Ok(wootters_analysis(rho)?.c_formation),
                        MeasureId::GConcurrence => return Ok(0.5 * wootters_analysis(rho)?.c_formation),
                        _ => {}
                    }
                }
                Ok(roof_optimize(rho, *measure, &cut, RoofMode::Min, config)?.value)
            }
        }
    }

    /// Value of a pure state across `cut`.
    pub fn evaluate_pure(&self, psi: &PureState, cut: &Cut) -> Result<f64> {
        match self {
            Evaluator::Negativity => negativity(&psi.density()?, cut),
            Evaluator::Formation { measure, .. } => pure_measure(*measure, psi, cut),
        }
    }
}

/// Evaluators for the cuts `A|BC`, `A|B` and `A|C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluators {
    pub abc: Evaluator,
    pub ab: Evaluator,
    pub ac: Evaluator,
}

impl Evaluators {
    pub fn uniform(e: Evaluator) -> Self {
        Self { abc: e.clone(), ab: e.clone(), ac: e }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonogamyReport {
    pub e_abc: f64,
    pub e_ab: f64,
    pub e_ac: f64,
    /// `e_ab / e_abc`, 0 when `e_abc = 0`.
    pub x1: f64,
    /// `e_ac / e_abc`, 0 when `e_abc = 0`.
    pub x2: f64,
    /// Smallest exponent with `x1^γ + x2^γ ≤ 1`; `None` if no finite one exists.
    pub gamma: Option<f64>,
    pub disentangling_satisfied: bool,
    /// `e_ac ≤ tol` whenever the disentangling equality holds (vacuously true otherwise).
    pub monogamy_verdict: bool,
    pub tolerance: f64,
}

fn check_tripartite(dims: &[usize]) -> Result<()> {
    if dims.len() != 3 {
        return Err(Error::BadShape(format!("expected dims [d_A, d_B, d_C], got {dims:?}")));
    }
    Ok(())
}

fn values(rho: &DensityMatrix, ev: &Evaluators) -> Result<(f64, f64, f64)> {
    check_tripartite(rho.dims())?;
    let d = rho.dims();
    let abc = rho.regroup(vec![d[0], d[1] * d[2]])?;
    let e_abc = ev.abc.evaluate(&abc)?;
    let e_ab = ev.ab.evaluate(&rho.partial_trace(&[0, 1])?)?;
    let e_ac = ev.ac.evaluate(&rho.partial_trace(&[0, 2])?)?;
    Ok((e_abc, e_ab, e_ac))
}

fn pure_values(psi: &PureState, ev: &Evaluators) -> Result<(f64, f64, f64)> {
    check_tripartite(psi.dims())?;
    let e_abc = ev.abc.evaluate_pure(psi, &Cut::new(vec![0], vec![1, 2]))?;
    let rho = psi.density()?;
    let e_ab = ev.ab.evaluate(&rho.partial_trace(&[0, 1])?)?;
    let e_ac = ev.ac.evaluate(&rho.partial_trace(&[0, 2])?)?;
    Ok((e_abc, e_ab, e_ac))
}

fn report(e_abc: f64, e_ab: f64, e_ac: f64, tol: f64) -> MonogamyReport {
    let (x1, x2) = if e_abc > 0.0 { (e_ab / e_abc, e_ac / e_abc) } else { (0.0, 0.0) };
    // Ratios a hair above 1 are numerical; discarding cannot increase a measure.
    // Ratios at rounding level are zero pairwise entanglement.
    let clip = |x: f64| {
        if x > 1.0 && x <= 1.0 + tol {
            1.0
        } else if x < 1e-12 {
            0.0
        } else {
            x
        }
    };
    let gamma = gamma_exponent(clip(x1), clip(x2)).ok();
    let disentangling_satisfied = (e_abc - e_ab).abs() <= tol * e_abc.max(1.0);
    MonogamyReport {
        e_abc,
        e_ab,
        e_ac,
        x1,
        x2,
        gamma,
        disentangling_satisfied,
        monogamy_verdict: !disentangling_satisfied || e_ac <= tol,
        tolerance: tol,
    }
}

/// Evaluate `A|BC`, `A|B`, `A|C` and test `E(A|BC) = E(AB)` at relative tolerance `tol`.
pub fn disentangling_check(rho: &DensityMatrix, ev: &Evaluators, tol: f64) -> Result<MonogamyReport> {
    let (a, b, c) = values(rho, ev)?;
    Ok(report(a, b, c, tol))
}

/// [`disentangling_check`] for a pure tripartite state.
pub fn disentangling_check_pure(psi: &PureState, ev: &Evaluators, tol: f64) -> Result<MonogamyReport> {
    let (a, b, c) = pure_values(psi, ev)?;
    Ok(report(a, b, c, tol))
}

/// `E^α(A|BC) − E^α(AB) − E^α(AC)`.
pub fn monogamy_deficit(rho: &DensityMatrix, ev: &Evaluators, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (a, b, c) = values(rho, ev)?;
    Ok(a.powf(alpha) - b.powf(alpha) - c.powf(alpha))
}

pub fn monogamy_deficit_pure(psi: &PureState, ev: &Evaluators, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (a, b, c) = pure_values(psi, ev)?;
    Ok(a.powf(alpha) - b.powf(alpha) - c.powf(alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfRange { value: alpha, range: "(0, inf)" });
    }
    Ok(())
}

/// Smallest `γ` with `x1^γ + x2^γ ≤ 1`.
///
/// Returns 0 when the inequality holds for every positive exponent (a ratio
/// of 0 next to one below 1, or 1 next to 0), and a `NonMonogamousWitness`
/// error when one ratio is 1 and the other positive.
pub fn gamma_exponent(x1: f64, x2: f64) -> Result<f64> {
    for x in [x1, x2] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange { value: x, range: "[0, 1]" });
        }
    }
    let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    if lo == 0.0 {
        return Ok(0.0);
    }
    if hi == 1.0 {
        return Err(Error::NonMonogamousWitness { x1, x2 });
    }
    let (l1, l2) = (x1.ln(), x2.ln());
    let excess = |g: f64| (g * l1).exp() + (g * l2).exp() - 1.0;
    let mut upper = 1.0;
    while excess(upper) > 0.0 {
        upper *= 2.0;
    }
    let mut lower = 0.0;
    while upper - lower > 1e-11 * upper.max(1.0) {
        let mid = 0.5 * (lower + upper);
        if excess(mid) > 0.0 {
            lower = mid;
        } else {
            upper = mid;
        }
    }
    Ok(0.5 * (lower + upper))
}

/// Equal-width histogram of finite exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    fn from_values(values: &[f64], bin_width: f64) -> Self {
        let mut counts = Vec::new();
        for &v in values {
            let k = (v / bin_width).floor() as usize;
            if counts.len() <= k {
                counts.resize(k + 1, 0);
            }
            counts[k] += 1;
        }
        Self { bin_width, counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    /// `"w"`, `"ghz"`, `"product"`, `"biseparable"` or `"haar:<index>"`.
    pub label: String,
    pub state: PureState,
    pub report: MonogamyReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentScan {
    /// Largest exponent seen; infinite if a non-monogamous witness occurred, 0 if nothing counted.
    pub alpha_hat: f64,
    pub worst: Option<ScanEntry>,
    pub histogram: Histogram,
    pub evaluated: usize,
    /// States with `e_abc < 1e-8`.
    pub skipped: usize,
    pub witnesses: usize,
}

/// Special states evaluated by [`exponent_scan`] alongside the random ones.
pub fn special_states(dims: &[usize]) -> Result<Vec<(String, PureState)>> {
    check_tripartite(dims)?;
    let n: usize = dims.iter().product();
    let dims = dims.to_vec();
    let from = |terms: &[[usize; 3]]| -> Result<PureState> {
        let mut amps = vec![C64::new(0.0, 0.0); n];
        for t in terms {
            let idx = (t[0] * dims[1] + t[1]) * dims[2] + t[2];
            amps[idx] += C64::new(1.0, 0.0);
        }
        PureState::normalize(amps, dims.clone())
    };
    let k = *dims.iter().min().expect("three dims");
    let mut out = vec![
        ("product".to_string(), from(&[[0, 0, 0]])?),
        ("ghz".to_string(), from(&(0..k).map(|i| [i, i, i]).collect::<Vec<_>>())?),
    ];
    if k >= 2 {
        out.push(("w".to_string(), from(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]])?));
        let m = dims[0].min(dims[1]);
        out.push(("biseparable".to_string(), from(&(0..m).map(|i| [i, i, 0]).collect::<Vec<_>>())?));
    }
    Ok(out)
}

const SKIP_BELOW: f64 = 1e-8;
const SCAN_TOL: f64 = 1e-6;

/// Largest monogamy exponent over Haar-random pure states (and the special
/// roster when requested). Sample `i` uses seed `derive_seed(seed, i)`; ties
/// in the maximum go to the earliest entry, specials first.
pub fn exponent_scan(
    dims: &[usize],
    ev: &Evaluators,
    n_samples: usize,
    seed: u64,
    include_special: bool,
) -> Result<ExponentScan> {
    check_tripartite(dims)?;
    let mut states = if include_special { special_states(dims)? } else { Vec::new() };
    let specials = states.len();
    let random: Vec<(String, PureState)> = (0..n_samples)
        .into_par_iter()
        .map(|i| Ok((format!("haar:{i}"), sample::haar_pure(dims, sample::derive_seed(seed, i as u64))?)))
        .collect::<Result<_>>()?;
    states.extend(random);
    debug_assert!(states.len() == specials + n_samples);

    let reports: Vec<MonogamyReport> =
        states.par_iter().map(|(_, psi)| disentangling_check_pure(psi, ev, SCAN_TOL)).collect::<Result<_>>()?;

    let mut best: Option<(usize, f64)> = None;
    let mut finite = Vec::new();
    let (mut skipped, mut witnesses) = (0, 0);
    for (i, r) in reports.iter().enumerate() {
        if r.e_abc < SKIP_BELOW {
            skipped += 1;
            continue;
        }
        let g = match r.gamma {
            Some(g) => {
                finite.push(g);
                g
            }
            None => {
                witnesses += 1;
                f64::INFINITY
            }
        };
        if best.map_or(true, |(_, b)| g > b) {
            best = Some((i, g));
        }
    }
    let evaluated = reports.len() - skipped;
    let (alpha_hat, worst) = match best {
        Some((i, g)) => {
            let (label, state) = states.swap_remove(i);
            (g, Some(ScanEntry { label, state, report: reports[i].clone() }))
        }
        None => (0.0, None),
    };
    Ok(ExponentScan {
        alpha_hat,
        worst,
        histogram: Histogram::from_values(&finite, 0.1),
        evaluated,
        skipped,
        witnesses,
    })
}

/// One term `q_j ρ_j^{AB^L} ⊗ |j⟩⟨j| ⊗ ρ_j^{B^RC}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovBlock {
    pub q: f64,
    pub ab_left: DensityMatrix,
    pub right_c: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSpec {
    pub blocks: Vec<MarkovBlock>,
    pub d_a: usize,
    pub d_bl: usize,
    pub d_br: usize,
    pub d_c: usize,
}

impl MarkovSpec {
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::BadSpec("Markov spec without blocks".into()));
        }
        let total: f64 = self.blocks.iter().map(|b| b.q).sum();
        if self.blocks.iter().any(|b| !(b.q >= 0.0)) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::BadSpec(format!("block weights must be a distribution (sum {total})")));
        }
        for (j, b) in self.blocks.iter().enumerate() {
            if b.ab_left.dim() != self.d_a * self.d_bl || b.right_c.dim() != self.d_br * self.d_c {
                return Err(Error::BadSpec(format!("block {j} does not match the declared dims")));
            }
        }
        Ok(())
    }

    /// Random blocks: pure `ρ_j^{AB^L}`, full-rank `ρ_j^{B^RC}`, uniform-simplex weights.
    pub fn random(d_a: usize, d_bl: usize, d_br: usize, d_c: usize, blocks: usize, seed: u64) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::BadSpec("Markov spec without blocks".into()));
        }
        let mut rng = sample::rng(seed);
        let raw: Vec<f64> = (0..blocks).map(|_| -rand::Rng::gen::<f64>(&mut rng).max(1e-300).ln()).collect();
        let total: f64 = raw.iter().sum();
        let blocks = raw
            .iter()
            .map(|w| {
                Ok(MarkovBlock {
                    q: w / total,
                    ab_left: sample::haar_pure_with(&mut rng, &[d_a, d_bl])?.density()?,
                    right_c: sample::hs_density_with(&mut rng, &[d_br, d_c], d_br * d_c)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { blocks, d_a, d_bl, d_br, d_c })
    }
}

/// `Σ_j q_j ρ_j^{AB^L} ⊗ |j⟩⟨j|^{B'} ⊗ ρ_j^{B^RC}` with dims `[d_A, d_{B^L}·n·d_{B^R}, d_C]`.
pub fn markov_build(spec: &MarkovSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let n = spec.blocks.len();
    let d = spec.d_a * spec.d_bl * n * spec.d_br * spec.d_c;
    let mut acc = ComplexMatrix::zeros(d, d);
    for (j, b) in spec.blocks.iter().enumerate() {
        if b.q == 0.0 {
            continue;
        }
        let flag = PureState::basis(&[j], vec![n])?.density()?;
        let term = b.ab_left.tensor(&flag).tensor(&b.right_c);
        acc += term.matrix() * C64::new(b.q, 0.0);
    }
    let acc = (&acc + acc.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(acc, vec![spec.d_a, spec.d_bl * n * spec.d_br, spec.d_c])
}

/// `S(AB) + S(BC) − S(ABC) − S(B)` in bits.
pub fn ssa_deficit(rho: &DensityMatrix) -> Result<f64> {
    check_tripartite(rho.dims())?;
    let s = |keep: &[usize]| von_neumann_entropy(&rho.partial_trace(keep)?);
    Ok(s(&[0, 1])? + s(&[1, 2])? - von_neumann_entropy(rho)? - s(&[1])?)
}

/// `Σ_j p_j |j⟩⟨j| ⊗ σ_j` with dims `[n, d_A, d_B]`.
pub fn flag_state(ensemble: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let Some((_, first)) = ensemble.first() else {
        return Err(Error::BadSpec("empty ensemble".into()));
    };
    if first.dims().len() != 2 || ensemble.iter().any(|(_, s)| s.dims() != first.dims()) {
        return Err(Error::BadSpec("ensemble members must share bipartite dims".into()));
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::BadSpec(format!("weights must be a distribution (sum {total})")));
    }
    let n = ensemble.len();
    let terms: Vec<DensityMatrix> = ensemble
        .iter()
        .enumerate()
        .map(|(j, (_, s))| Ok(PureState::basis(&[j], vec![n])?.density()?.tensor(s)))
        .collect::<Result<_>>()?;
    let parts: Vec<(f64, &DensityMatrix)> = ensemble.iter().map(|(p, _)| *p).zip(terms.iter()).collect();
    DensityMatrix::mixture(&parts)
}
