//! Pure-state decompositions and convex-roof extensions.
//!
//! Every decomposition of a density matrix of rank `r` into `m ≥ r`
//! subnormalized vectors is `|y_k> = Σ_j u_kj |w_j>` for an `m × r`
//! isometry `U` applied to a fixed root decomposition `{|w_j>}`. The
//! formation value (minimum of the ensemble average) and the assistance
//! value (maximum) are found by local search over `U`.

mod objective;
mod optimize;
mod zero_tail;

use rayon::prelude::*;

use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::measures::{pure_measure, MeasureId};
use crate::sample;
use crate::state::{Cut, Decomposition, DensityMatrix, PureState, WEIGHT_FLOOR};
use crate::{Error, Result};

use objective::{Objective, Shape};
use optimize::Settings;

pub use zero_tail::{pair_rotation, zero_g_tail, PairRotation, TAU_DET};

/// Optimizer settings for [`roof_optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoofConfig {
    /// Ensemble size `m`; `None` means `rank²`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 20,
            max_iterations: 2000,
            step_tolerance: 1e-10,
            value_tolerance: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoofMode {
    /// Convex roof (formation): minimum average over decompositions.
    Min,
    /// Concave roof (assistance): maximum average over decompositions.
    Max,
}

impl std::str::FromStr for RoofMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" | "formation" => Ok(RoofMode::Min),
            "max" | "assistance" => Ok(RoofMode::Max),
            _ => Err(Error::BadSpec(format!("unknown roof mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for RoofMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RoofMode::Min => "min",
            RoofMode::Max => "max",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub decomposition: Decomposition,
    pub mode: RoofMode,
    /// Whether the winning restart met a stopping tolerance before the iteration cap.
    pub converged: bool,
    pub restarts_used: usize,
}

/// `|y_k> = Σ_j u_kj |w_j>` for an `m × r` isometry `u`.
pub fn apply_isometry(roots: &Decomposition, u: &ComplexMatrix) -> Result<Decomposition> {
    if u.ncols() != roots.len() {
        return Err(Error::BadShape(format!("{}x{} isometry for {} vectors", u.nrows(), u.ncols(), roots.len())));
    }
    let err = linalg::isometry_error(u);
    if !(err <= 1e-10) {
        return Err(Error::NotIsometry(err));
    }
    let dim = roots.vectors()[0].dim();
    let dims = roots.dims().to_vec();
    let vectors = (0..u.nrows())
        .map(|k| {
            let mut acc = ComplexVector::zeros(dim);
            for (j, w) in roots.vectors().iter().enumerate() {
                acc.axpy(u[(k, j)], w.amplitudes(), C64::new(1.0, 0.0));
            }
            PureState::from_vector(acc, dims.clone())
        })
        .collect();
    Decomposition::new(vectors)
}

/// `Σ_j p_j E(ψ_j)` with `p_j` the squared norms; members with `p_j < 1e-14` are skipped.
pub fn decomposition_average(m: MeasureId, dec: &Decomposition, cut: &Cut) -> Result<f64> {
    cut.validate(dec.dims().len())?;
    dec.vectors()
        .iter()
        .filter(|v| v.norm_sqr() >= WEIGHT_FLOOR)
        .map(|v| pure_measure(m, v, cut))
        .sum()
}

fn padded_identity(m: usize, r: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, r, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Min-mode results below this fraction of the spectral average are
/// re-polished on the sum of squared member values.
const POLISH_FRACTION: f64 = 1e-2;

struct Trial {
    u: ComplexMatrix,
    value: f64,
    converged: bool,
}

fn run_restart(obj: &Objective, mode: RoofMode, u0: ComplexMatrix, cfg: &RoofConfig, spectral: f64) -> Trial {
    let sign = match mode {
        RoofMode::Min => 1.0,
        RoofMode::Max => -1.0,
    };
    let settings = Settings {
        max_iterations: cfg.max_iterations,
        step_tolerance: cfg.step_tolerance,
        value_tolerance: cfg.value_tolerance,
        value_floor: 1.0,
    };
    let out = optimize::minimize(obj, Shape::Sum, sign, u0, &settings);
    let mut best = Trial { value: sign * out.value, u: out.u, converged: out.converged };
    if mode == RoofMode::Min && best.value < POLISH_FRACTION * spectral {
        // The member values are non-smooth where they vanish; their squares are not.
        let squares = Settings { value_floor: 1e-30, ..settings };
        let polished = optimize::minimize(obj, Shape::SumOfSquares, 1.0, best.u.clone(), &squares);
        let again = optimize::minimize(obj, Shape::Sum, 1.0, polished.u.clone(), &settings);
        let pv = obj.value(&polished.u, Shape::Sum);
        if pv < best.value {
            best = Trial { value: pv, u: polished.u, converged: polished.converged };
        }
        if again.value < best.value {
            best = Trial { value: again.value, u: again.u, converged: again.converged };
        }
    }
    best
}

/// Optimize the ensemble average of `measure` across `cut` over
/// decompositions of `rho`. Restart 0 starts from the spectral decomposition;
/// the others from seeded random isometries. The best restart wins, ties
/// going to the lowest index.
pub fn roof_optimize(
    rho: &DensityMatrix,
    measure: MeasureId,
    cut: &Cut,
    mode: RoofMode,
    cfg: &RoofConfig,
) -> Result<RoofResult> {
    measure.validate()?;
    cut.validate(rho.dims().len())?;
    let roots = Decomposition::spectral(rho)?;
    let r = roots.len();
    let m = match cfg.ensemble_size {
        Some(m) if m < r => {
            return Err(Error::BadSpec(format!("ensemble size {m} below rank {r}")));
        }
        Some(m) => m,
        None => r * r,
    };
    let restarts = cfg.restarts.max(1);
    let obj = Objective::new(measure, &roots, cut)?;
    let start = padded_identity(m, r);
    let spectral = obj.value(&start, Shape::Sum);

    let trials: Vec<Trial> = if r == 1 {
        vec![Trial { u: start, value: spectral, converged: true }]
    } else {
        (0..restarts)
            .into_par_iter()
            .map(|i| {
                let u0 = if i == 0 {
                    padded_identity(m, r)
                } else {
                    sample::isometry(m, r, sample::derive_seed(cfg.seed, i as u64))
                        .expect("m >= r was checked")
                };
                run_restart(&obj, mode, u0, cfg, spectral)
            })
            .collect()
    };
    let better = |a: f64, b: f64| match mode {
        RoofMode::Min => a < b,
        RoofMode::Max => a > b,
    };
    let mut best = 0;
    for (i, t) in trials.iter().enumerate() {
        if better(t.value, trials[best].value) {
            best = i;
        }
    }
    let winner = &trials[best];
    let full = apply_isometry(&roots, &winner.u)?;
    let kept: Vec<PureState> = full.into_vectors().into_iter().filter(|v| v.norm_sqr() >= WEIGHT_FLOOR).collect();
    let decomposition = Decomposition::new(kept)?;
    let value = decomposition_average(measure, &decomposition, cut)?;
    Ok(RoofResult { value, decomposition, mode, converged: winner.converged, restarts_used: trials.len() })
}

/// Summary of ensemble averages over sampled decompositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSummary {
    pub min_avg: f64,
    pub max_avg: f64,
    pub spread: f64,
    /// Number of decompositions evaluated (spectral one included).
    pub evaluated: usize,
}

/// Average of `measure` over the spectral decomposition and `samples`
/// random isometric mixings of sizes cycling through `r..=r²`.
pub fn invariance_scan(rho: &DensityMatrix, measure: MeasureId, cut: &Cut, samples: usize, seed: u64) -> Result<ScanSummary> {
    measure.validate()?;
    cut.validate(rho.dims().len())?;
    let roots = Decomposition::spectral(rho)?;
    let r = roots.len();
    let mut values = vec![decomposition_average(measure, &roots, cut)?];
    let sizes = r * r - r + 1;
    for i in 0..samples {
        let m = r + i % sizes;
        let u = sample::isometry(m, r, sample::derive_seed(seed, i as u64))?;
        values.push(decomposition_average(measure, &apply_isometry(&roots, &u)?, cut)?);
    }
    let min_avg = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_avg = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ScanSummary { min_avg, max_avg, spread: max_avg - min_avg, evaluated: values.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::measures::wootters_analysis;

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)], vec![2, 2]).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        let b = bell().density().unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        DensityMatrix::mixture(&[(p, &b), (1.0 - p, &mixed)]).unwrap()
    }

    #[test]
    fn apply_isometry_examples() {
        let rho = sample::hs_density(&[2, 3], 3, 1).unwrap();
        let dec = Decomposition::spectral(&rho).unwrap();
        let same = apply_isometry(&dec, &linalg::identity(3)).unwrap();
        for (a, b) in same.vectors().iter().zip(dec.vectors()) {
            assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-15);
        }
        for seed in 0..10 {
            let u = sample::isometry(7, 3, seed).unwrap();
            let out = apply_isometry(&dec, &u).unwrap();
            assert_eq!(out.len(), 7);
            assert!((out.reconstruct() - dec.reconstruct()).norm() < 1e-12);
        }
        // A 2×1 isometry splits one vector into two parallel copies.
        let single = Decomposition::spectral(&bell().density().unwrap()).unwrap();
        let u = ComplexMatrix::from_column_slice(2, 1, &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let split = apply_isometry(&single, &u).unwrap();
        let v0 = &split.vectors()[0];
        let v1 = &split.vectors()[1];
        assert!((v0.norm_sqr() - 0.36).abs() < 1e-14 && (v1.norm_sqr() - 0.64).abs() < 1e-14);
        assert!((v0.inner(v1).norm() - 0.48).abs() < 1e-14);

        let bad = ComplexMatrix::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(apply_isometry(&single, &bad), Err(Error::NotIsometry(_))));
    }

    #[test]
    fn decomposition_average_examples() {
        let cut = Cut::two_party();
        let single = Decomposition::spectral(&bell().density().unwrap()).unwrap();
        let v = decomposition_average(MeasureId::Concurrence, &single, &cut).unwrap();
        assert!((v - 1.0).abs() < 1e-14);

        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let p0 = PureState::basis(&[0, 0], vec![2, 2]).unwrap().scaled(h);
        let p1 = PureState::basis(&[1, 0], vec![2, 2]).unwrap().scaled(h);
        let dec = Decomposition::new(vec![p0, p1]).unwrap();
        for m in [MeasureId::Concurrence, MeasureId::GConcurrence, MeasureId::Entropy] {
            assert!(decomposition_average(m, &dec, &cut).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn pure_input_gives_pure_value_in_both_modes() {
        let psi = sample::haar_pure(&[2, 3], 4).unwrap();
        let rho = psi.density().unwrap();
        let cut = Cut::two_party();
        let e = pure_measure(MeasureId::Entropy, &psi, &cut).unwrap();
        for mode in [RoofMode::Min, RoofMode::Max] {
            let res = roof_optimize(&rho, MeasureId::Entropy, &cut, mode, &RoofConfig::default()).unwrap();
            assert!((res.value - e).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_formation_concurrence() {
        let rho = werner(0.8);
        let res = roof_optimize(&rho, MeasureId::Concurrence, &Cut::two_party(), RoofMode::Min, &RoofConfig::default())
            .unwrap();
        assert!((res.value - 0.7).abs() < 1e-6, "{}", res.value);
        assert!(res.decomposition.reconstruction_error(&rho) < 1e-9);
    }

    #[test]
    fn random_rank_two_matches_wootters() {
        let cut = Cut::two_party();
        for seed in 0..5 {
            let rho = sample::hs_density(&[2, 2], 2, 100 + seed).unwrap();
            let w = wootters_analysis(&rho).unwrap();
            let cfg = RoofConfig::default();
            let lo = roof_optimize(&rho, MeasureId::Concurrence, &cut, RoofMode::Min, &cfg).unwrap();
            let hi = roof_optimize(&rho, MeasureId::Concurrence, &cut, RoofMode::Max, &cfg).unwrap();
            assert!((lo.value - w.c_formation).abs() < 1e-6, "seed {seed}: {} vs {}", lo.value, w.c_formation);
            assert!((hi.value - w.c_assistance).abs() < 1e-6, "seed {seed}: {} vs {}", hi.value, w.c_assistance);
        }
    }

    #[test]
    fn roof_bounds_sampled_decompositions() {
        let rho = sample::hs_density(&[2, 3], 3, 8).unwrap();
        let cut = Cut::two_party();
        let m = MeasureId::Entropy;
        let cfg = RoofConfig { restarts: 4, ..Default::default() };
        let lo = roof_optimize(&rho, m, &cut, RoofMode::Min, &cfg).unwrap();
        let hi = roof_optimize(&rho, m, &cut, RoofMode::Max, &cfg).unwrap();
        let scan = invariance_scan(&rho, m, &cut, 30, 2).unwrap();
        assert!(lo.value <= scan.min_avg + 1e-9);
        assert!(hi.value >= scan.max_avg - 1e-9);
        assert!(lo.value <= hi.value);
        assert!(lo.decomposition.reconstruction_error(&rho) < 1e-9);
    }

    #[test]
    fn ensemble_size_below_rank_is_rejected() {
        let rho = sample::hs_density(&[2, 2], 3, 8).unwrap();
        let cfg = RoofConfig { ensemble_size: Some(2), ..Default::default() };
        assert!(roof_optimize(&rho, MeasureId::Concurrence, &Cut::two_party(), RoofMode::Min, &cfg).is_err());
    }

    #[test]
    fn invariance_scan_examples() {
        let cut = Cut::two_party();
        let pure = bell().density().unwrap();
        let s = invariance_scan(&pure, MeasureId::Concurrence, &cut, 20, 1).unwrap();
        assert!(s.spread < 1e-12);
        assert_eq!(s.evaluated, 21);

        let s = invariance_scan(&werner(0.8), MeasureId::Concurrence, &cut, 50, 1).unwrap();
        assert!(s.spread > 0.01);
    }
}
