//! JSON state files.
//!
//! ```json
//! {"kind": "density", "dims": [2, 2], "data": [[0.5, 0.0], ...], "meta": {"source": "gen ghz"}}
//! ```
//!
//! `data` holds `[re, im]` pairs: amplitudes for `pure`, the row-major matrix
//! for `density`. Numbers are written in shortest round-trip form, so a
//! save/load cycle reproduces every entry bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use qmono::{ComplexMatrix, DensityMatrix, Error as CoreError, PureState, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: Kind,
    pub dims: Vec<usize>,
    pub data: Vec<[f64; 2]>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Density(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(p) => p.dims(),
            State::Density(d) => d.dims(),
        }
    }

    pub fn density(&self) -> Result<DensityMatrix, CoreError> {
        match self {
            State::Pure(p) => p.density(),
            State::Density(d) => Ok(d.clone()),
        }
    }
}

impl StateFile {
    pub fn from_pure(psi: &PureState, meta: BTreeMap<String, String>) -> Self {
        let data = psi.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        Self { kind: Kind::Pure, dims: psi.dims().to_vec(), data, meta }
    }

    pub fn from_density(rho: &DensityMatrix, meta: BTreeMap<String, String>) -> Self {
        let m = rho.matrix();
        let n = m.nrows();
        let data = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| [m[(i, j)].re, m[(i, j)].im]).collect();
        Self { kind: Kind::Density, dims: rho.dims().to_vec(), data, meta }
    }

    pub fn from_state(state: &State, meta: BTreeMap<String, String>) -> Self {
        match state {
            State::Pure(p) => Self::from_pure(p, meta),
            State::Density(d) => Self::from_density(d, meta),
        }
    }

    /// Parse JSON text; `origin` names the source in messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Check shapes and the type invariants, producing a state.
    pub fn to_state(&self, text: &str, origin: &str) -> Result<State, CliError> {
        let n: usize = self.dims.iter().product();
        if self.dims.is_empty() || n == 0 {
            return Err(parse_error_at(text, origin, "\"dims\"", format!("invalid dims {:?}", self.dims)));
        }
        let expected = match self.kind {
            Kind::Pure => n,
            Kind::Density => n * n,
        };
        if self.data.len() != expected {
            return Err(parse_error_at(
                text,
                origin,
                "\"data\"",
                format!("data has {} entries, expected {expected} for {:?} dims {:?}", self.data.len(), self.kind, self.dims),
            ));
        }
        let entries: Vec<C64> = self.data.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let invariant = |e: CoreError| CliError::Invariant { origin: origin.to_string(), invariant: invariant_name(&e), detail: e.to_string() };
        match self.kind {
            Kind::Pure => PureState::new(entries, self.dims.clone()).map(State::Pure).map_err(invariant),
            Kind::Density => {
                let m = ComplexMatrix::from_row_slice(n, n, &entries);
                DensityMatrix::new(m, self.dims.clone()).map(State::Density).map_err(invariant)
            }
        }
    }
}

fn invariant_name(e: &CoreError) -> &'static str {
    match e {
        CoreError::NotHermitian(_) => "hermitian",
        CoreError::NotPsd(_) => "positive semidefinite",
        CoreError::NotNormalized(_) => "normalization",
        CoreError::InvariantViolation(s) if s.starts_with("trace") => "trace",
        CoreError::InvariantViolation(s) if s.starts_with("finite") => "finite entries",
        CoreError::BadShape(_) => "shape",
        _ => "state",
    }
}

/// Parse error located at the first line containing `needle`.
fn parse_error_at(text: &str, origin: &str, needle: &str, message: String) -> CliError {
    let line = text.lines().position(|l| l.contains(needle)).map_or(1, |i| i + 1);
    CliError::Parse { origin: origin.to_string(), line, column: 1, message }
}

pub fn load_state(path: &Path) -> Result<State, CliError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {origin}: {e}")))?;
    StateFile::parse(&text, &origin)?.to_state(&text, &origin)
}

pub fn to_json(file: &StateFile) -> String {
    serde_json::to_string_pretty(file).expect("state files serialize")
}

pub fn save_state(file: &StateFile, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, to_json(file) + "\n").map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmono::sample;

    fn round_trip(state: &State) -> State {
        let text = to_json(&StateFile::from_state(state, BTreeMap::new()));
        StateFile::parse(&text, "mem").unwrap().to_state(&text, "mem").unwrap()
    }

    #[test]
    fn density_round_trip_is_exact() {
        for seed in 0..5 {
            let rho = State::Density(sample::hs_density(&[2, 3], 4, seed).unwrap());
            assert_eq!(round_trip(&rho), rho);
        }
        let psi = State::Pure(sample::haar_pure(&[3, 2], 9).unwrap());
        assert_eq!(round_trip(&psi), psi);
    }

    #[test]
    fn bad_trace_names_the_invariant() {
        let text = r#"{"kind": "density", "dims": [2], "data": [[0.5, 0], [0, 0], [0, 0], [0.4, 0]]}"#;
        let err = StateFile::parse(text, "t").unwrap().to_state(text, "t").unwrap_err();
        assert!(matches!(err, CliError::Invariant { invariant: "trace", .. }), "{err}");
    }

    #[test]
    fn wrong_length_is_a_parse_error() {
        let text = "{\n  \"kind\": \"pure\",\n  \"dims\": [2, 2],\n  \"data\": [[1, 0], [0, 0]]\n}";
        let err = StateFile::parse(text, "t").unwrap().to_state(text, "t").unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn malformed_json_reports_its_line() {
        let text = "{\n  \"kind\": \"pure\",\n  \"dims\": [2,\n}";
        match StateFile::parse(text, "t").unwrap_err() {
            CliError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }
}
