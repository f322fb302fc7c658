//! `qmono` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 numerical failure.

mod config;
mod error;
mod output;
mod statefile;
mod suites;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmono::charstates::{gmono_state, random_w_class, w_class_state, GMonoSpec};
use qmono::measures::{negativity, pure_measure, wootters_analysis, MeasureId};
use qmono::monogamy::{
    disentangling_check, disentangling_check_pure, exponent_scan, markov_build, Evaluator, Evaluators, MarkovSpec,
    MonogamyReport,
};
use qmono::roof::roof_optimize;
use qmono::{sample, Cut, PureState, RoofMode, C64};
use serde_json::{json, Value};

use config::{Format, RunConfig};
use error::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
use output::{num, Report};
use statefile::{load_state, save_state, State, StateFile};

#[derive(Parser)]
#[command(name = "qmono", version, about = "Entanglement measures, convex roofs and monogamy checks")]
struct Cli {
    /// JSON run configuration (seed, tolerance, samples, roof, output, threads).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Worker threads; `QMONO_THREADS` takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Relative tolerance of the disentangling test.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Roof optimizer restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement across a cut (pure formula, or formation value for mixed input).
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// `"i,j|k"`; defaults to `0|1` for two subsystems.
        #[arg(long)]
        cut: Option<String>,
        /// concurrence|C, g_concurrence|G, entropy|E, renyi:α, tsallis:q, negativity|N
        #[arg(long)]
        measure: String,
    },
    /// Optimize the decomposition average (min = formation, max = assistance).
    Roof {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        cut: Option<String>,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "min")]
        mode: String,
    },
    /// Disentangling condition and monogamy report for a tripartite state.
    Monogamy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        measure: String,
        /// Also report E^α(A|BC) − E^α(AB) − E^α(AC).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Largest monogamy exponent over random pure states.
    Exponent {
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        #[arg(long)]
        measure: String,
        /// Skip the W / GHZ / product / biseparable roster.
        #[arg(long)]
        no_special: bool,
        /// Write the maximizing state here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a state file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a verification suite.
    Verify {
        /// wootters-oracle, markov, ckw, wclass, gmono-invariance, zero-g-tail, cor8
        suite: String,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// λ1|100⟩ + λ2|010⟩ + λ3|001⟩ + λ4|000⟩ (random λ when omitted).
    Wclass {
        /// Four real amplitudes, e.g. `0.5,0.5,0.5,0.5`.
        #[arg(long)]
        lambdas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Σ_i |i…i⟩ / √k.
    Ghz {
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random Markov state with dims A, B^L, B^R, C.
    Markov {
        #[arg(long, default_value = "2,2,2,2")]
        dims: String,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// State with support X·(span{I} ⊕ nilpotent space).
    Gmono {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Positive member weights (uniform when omitted).
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Haar pure state (no rank) or random density matrix of the given rank.
    Random {
        #[arg(long, default_value = "2,2")]
        dims: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum MeasureArg {
    Negativity,
    Roof(MeasureId),
}

fn parse_measure(s: &str) -> Result<MeasureArg, CliError> {
    match s {
        "negativity" | "N" => Ok(MeasureArg::Negativity),
        _ => s.parse().map(MeasureArg::Roof).map_err(|e: qmono::Error| CliError::Usage(e.to_string())),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad {what} entry {t:?} in {s:?}"))))
        .collect()
}

fn parse_cut(spec: Option<&str>, dims: &[usize]) -> Result<Cut, CliError> {
    match spec {
        Some(s) => Ok(Cut::parse_with(s, Some(dims.len()))?),
        None if dims.len() == 2 => Ok(Cut::two_party()),
        None => Err(CliError::Usage(format!("--cut is required for {} subsystems", dims.len()))),
    }
}

fn evaluator(m: &MeasureArg, cfg: &RunConfig) -> Evaluator {
    match m {
        MeasureArg::Negativity => Evaluator::Negativity,
        MeasureArg::Roof(id) => Evaluator::Formation { measure: *id, config: cfg.roof_config() },
    }
}

fn run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.output {
        cfg.output = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.samples {
        cfg.samples = Some(v);
    }
    if let Some(v) = cli.tol {
        cfg.tolerance = v;
    }
    if let Some(v) = cli.restarts {
        cfg.roof.restarts = v;
    }
    if let Some(v) = cli.threads {
        cfg.threads = Some(v);
    }
    if let Ok(v) = std::env::var("QMONO_THREADS") {
        let n = v.trim().parse().map_err(|_| CliError::Usage(format!("QMONO_THREADS={v:?} is not a count")))?;
        cfg.threads = Some(n);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn meta(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn report_fields(r: &MonogamyReport) -> Vec<(&'static str, Value)> {
    vec![
        ("e_abc", num(r.e_abc)),
        ("e_ab", num(r.e_ab)),
        ("e_ac", num(r.e_ac)),
        ("x1", num(r.x1)),
        ("x2", num(r.x2)),
        ("gamma", r.gamma.map_or(Value::Null, num)),
        ("disentangling_satisfied", json!(r.disentangling_satisfied)),
        ("monogamy_verdict", json!(r.monogamy_verdict)),
        ("tolerance", num(r.tolerance)),
    ]
}

/// Write `file` to `out`, or return it as the report when no path is given.
fn emit_state(file: StateFile, out: Option<&Path>) -> Result<Report, CliError> {
    match out {
        Some(path) => {
            save_state(&file, path)?;
            Ok(Report::Record(vec![
                ("path", json!(path.display().to_string())),
                ("kind", serde_json::to_value(file.kind).expect("kind serializes")),
                ("dims", json!(file.dims)),
            ]))
        }
        None => Ok(Report::Record(vec![
            ("kind", serde_json::to_value(file.kind).expect("kind serializes")),
            ("dims", json!(file.dims)),
            ("data", json!(file.data)),
            ("meta", json!(file.meta)),
        ])),
    }
}

fn ghz(dims: &[usize]) -> Result<PureState, CliError> {
    let k = *dims.iter().min().ok_or_else(|| CliError::Usage("empty dims".into()))?;
    let n: usize = dims.iter().product();
    let mut amps = vec![C64::new(0.0, 0.0); n];
    for i in 0..k {
        let idx = dims.iter().fold(0, |acc, &d| acc * d + i);
        amps[idx] = C64::new(1.0, 0.0);
    }
    Ok(PureState::normalize(amps, dims.to_vec())?)
}

fn generate(kind: &GenKind, cfg: &RunConfig) -> Result<Report, CliError> {
    let seed = cfg.seed;
    match kind {
        GenKind::Wclass { lambdas, out } => {
            let psi = match lambdas {
                Some(s) => {
                    let l: Vec<f64> = parse_list(s, "lambda")?;
                    let l: [f64; 4] = l.try_into().map_err(|_| CliError::Usage("--lambdas needs four values".into()))?;
                    w_class_state(l.map(|x| C64::new(x, 0.0)))?
                }
                None => random_w_class(seed)?,
            };
            let m = meta(&[("generator", "wclass".into()), ("seed", seed.to_string())]);
            emit_state(StateFile::from_pure(&psi, m), out.as_deref())
        }
        GenKind::Ghz { dims, out } => {
            let psi = ghz(&parse_list(dims, "dimension")?)?;
            emit_state(StateFile::from_pure(&psi, meta(&[("generator", "ghz".into())])), out.as_deref())
        }
        GenKind::Markov { dims, blocks, out } => {
            let d: Vec<usize> = parse_list(dims, "dimension")?;
            let [da, dbl, dbr, dc] = d[..] else {
                return Err(CliError::Usage("markov --dims needs d_A,d_BL,d_BR,d_C".into()));
            };
            let rho = markov_build(&MarkovSpec::random(da, dbl, dbr, dc, *blocks, seed)?)?;
            let m = meta(&[("generator", "markov".into()), ("blocks", blocks.to_string()), ("seed", seed.to_string())]);
            emit_state(StateFile::from_density(&rho, m), out.as_deref())
        }
        GenKind::Gmono { d, r, weights, out } => {
            let spec = GMonoSpec::random(*d, *r, seed)?;
            let w = match weights {
                Some(s) => parse_list(s, "weight")?,
                None => vec![1.0; *r],
            };
            let rho = gmono_state(&spec, &w)?;
            let m = meta(&[("generator", "gmono".into()), ("d", d.to_string()), ("r", r.to_string()), ("seed", seed.to_string())]);
            emit_state(StateFile::from_density(&rho, m), out.as_deref())
        }
        GenKind::Random { dims, rank, out } => {
            let d: Vec<usize> = parse_list(dims, "dimension")?;
            let state = match rank {
                None => State::Pure(sample::haar_pure(&d, seed)?),
                Some(r) => State::Density(sample::hs_density(&d, *r, seed)?),
            };
            let m = meta(&[("generator", "random".into()), ("seed", seed.to_string())]);
            emit_state(StateFile::from_state(&state, m), out.as_deref())
        }
    }
}

/// Returns the report and whether it represents a failed verification.
fn execute(cli: &Cli, cfg: &RunConfig) -> Result<(Report, bool), CliError> {
    let report = match &cli.command {
        Command::Measure { state, cut, measure } => {
            let state = load_state(state)?;
            let cut = parse_cut(cut.as_deref(), state.dims())?;
            let m = parse_measure(measure)?;
            let mut fields = vec![("measure", json!(measure)), ("cut", json!(cut.to_string()))];
            let value = match (&state, &m) {
                (State::Pure(psi), MeasureArg::Roof(id)) => pure_measure(*id, psi, &cut)?,
                (_, MeasureArg::Negativity) => negativity(&state.density()?, &cut)?,
                (State::Density(rho), roof) => {
                    let bip = rho.as_bipartite(&cut)?;
                    if bip.dims() == [2, 2] {
                        let w = wootters_analysis(&bip)?;
                        fields.push(("c_formation", num(w.c_formation)));
                        fields.push(("c_assistance", num(w.c_assistance)));
                        fields.push(("r_rank", json!(w.r_rank)));
                    }
                    evaluator(roof, cfg).evaluate(&bip)?
                }
            };
            fields.insert(2, ("value", num(value)));
            Report::Record(fields)
        }
        Command::Roof { state, cut, measure, mode } => {
            let state = load_state(state)?;
            let cut = parse_cut(cut.as_deref(), state.dims())?;
            let MeasureArg::Roof(id) = parse_measure(measure)? else {
                return Err(CliError::Usage("negativity is not a convex-roof measure".into()));
            };
            let mode: RoofMode = mode.parse().map_err(|e: qmono::Error| CliError::Usage(e.to_string()))?;
            let res = roof_optimize(&state.density()?, id, &cut, mode, &cfg.roof_config())?;
            Report::Record(vec![
                ("measure", json!(id.to_string())),
                ("cut", json!(cut.to_string())),
                ("mode", json!(mode.to_string())),
                ("value", num(res.value)),
                ("converged", json!(res.converged)),
                ("restarts_used", json!(res.restarts_used)),
                ("members", json!(res.decomposition.len())),
                ("weights", Value::Array(res.decomposition.weights().into_iter().map(num).collect())),
            ])
        }
        Command::Monogamy { state, measure, alpha } => {
            let state = load_state(state)?;
            let ev = Evaluators::uniform(evaluator(&parse_measure(measure)?, cfg));
            let r = match &state {
                State::Pure(psi) => disentangling_check_pure(psi, &ev, cfg.tolerance)?,
                State::Density(rho) => disentangling_check(rho, &ev, cfg.tolerance)?,
            };
            let mut fields = vec![("measure", json!(measure))];
            fields.extend(report_fields(&r));
            if let Some(a) = alpha {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(CliError::Usage(format!("--alpha must be positive, got {a}")));
                }
                fields.push(("alpha", num(*a)));
                fields.push(("deficit", num(r.e_abc.powf(*a) - r.e_ab.powf(*a) - r.e_ac.powf(*a))));
            }
            Report::Record(fields)
        }
        Command::Exponent { dims, measure, no_special, out } => {
            let dims: Vec<usize> = parse_list(dims, "dimension")?;
            let ev = Evaluators::uniform(evaluator(&parse_measure(measure)?, cfg));
            let samples = cfg.samples.unwrap_or(1000);
            let scan = exponent_scan(&dims, &ev, samples, cfg.seed, !no_special)?;
            let (label, state) = match &scan.worst {
                Some(w) => {
                    let file = StateFile::from_pure(&w.state, meta(&[("label", w.label.clone())]));
                    if let Some(path) = out {
                        save_state(&file, path)?;
                    }
                    (json!(w.label), serde_json::to_value(&file).expect("state files serialize"))
                }
                None => (Value::Null, Value::Null),
            };
            Report::Record(vec![
                ("measure", json!(measure)),
                ("samples", json!(samples)),
                ("seed", json!(cfg.seed)),
                ("alpha_hat", if scan.alpha_hat.is_finite() { num(scan.alpha_hat) } else { json!("inf") }),
                ("maximizer", label),
                ("evaluated", json!(scan.evaluated)),
                ("skipped", json!(scan.skipped)),
                ("witnesses", json!(scan.witnesses)),
                ("histogram", json!({"bin_width": scan.histogram.bin_width, "counts": scan.histogram.counts})),
                ("maximizer_state", state),
            ])
        }
        Command::Gen { kind } => generate(kind, cfg)?,
        Command::Verify { suite } => {
            let checks = suites::run(suite, cfg)?;
            let failed = checks.iter().any(|c| !c.passed);
            let rows = checks
                .iter()
                .map(|c| vec![json!(suite), json!(c.name), num(c.value), json!(c.condition), json!(c.passed)])
                .collect();
            return Ok((Report::Table { columns: vec!["suite", "check", "value", "condition", "passed"], rows }, failed));
        }
    };
    Ok((report, false))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run_config(&cli).and_then(|cfg| {
        if let Some(n) = cfg.threads {
            // Fails only if a pool already exists, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        execute(&cli, &cfg).map(|r| (r, cfg.output))
    });
    match result {
        Ok(((report, failed), format)) => {
            print!("{}", report.render(format));
            if format == Format::Json {
                println!();
            }
            ExitCode::from(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
