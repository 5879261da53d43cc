//! State-file parsing, run reports and the random self-test used by the
//! `sparseprep` binary.
//!
//! A state file holds one term per line:
//!
//! ```text
//! # bits  re  [im]
//! 0110 0.5 -0.25
//! 1011 0.5
//! # bits  polar  rho  phi
//! 1111 polar 0.3 1.5707963267948966
//! ```
//!
//! Character `k` of the bitstring is qubit `k`. Everything after `#` is
//! ignored. Amplitudes need not be normalized.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use sparseprep::qasm::{to_qasm_with, QasmOptions};
use sparseprep::simulator::{index_to_bits, CompareMode, MAX_QUBITS};
use sparseprep::synthesis::SynthesisError;
use sparseprep::{synthesize, BasisState, ResourceReport, SparseState, SynthesisResult, TreeStrategy};

/// Amplitude tolerance for `--verify`.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: malformed number {token:?}")]
    Number { line: usize, token: String },
    #[error("line {line}: bitstring has {got} bits, expected {expected} (from line {first_line})")]
    Length {
        line: usize,
        first_line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: bitstring {bits} already given on line {first_line}")]
    Duplicate {
        line: usize,
        first_line: usize,
        bits: String,
    },
    #[error("line {line}: amplitude is zero")]
    ZeroAmplitude { line: usize },
    #[error("no terms in state file")]
    Empty,
}

fn number(tok: &str, line: usize) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(ParseError::Number {
            line,
            token: tok.to_string(),
        }),
    }
}

fn parse_line(toks: &[&str], line: usize) -> Result<(BasisState, Complex64), ParseError> {
    let bits: BasisState = toks[0].parse().map_err(|e: SynthesisError| ParseError::Syntax {
        line,
        msg: e.to_string(),
    })?;
    if bits.is_empty() {
        return Err(ParseError::Syntax {
            line,
            msg: "empty bitstring".into(),
        });
    }
    let amp = match &toks[1..] {
        ["polar", rho, phi] => Complex64::from_polar(number(rho, line)?, number(phi, line)?),
        ["polar", ..] => {
            return Err(ParseError::Syntax {
                line,
                msg: "polar form needs exactly RHO PHI".into(),
            })
        }
        [re] => Complex64::new(number(re, line)?, 0.0),
        [re, im] => Complex64::new(number(re, line)?, number(im, line)?),
        [] => {
            return Err(ParseError::Syntax {
                line,
                msg: "missing amplitude".into(),
            })
        }
        _ => {
            return Err(ParseError::Syntax {
                line,
                msg: format!("expected BITS RE [IM] or BITS polar RHO PHI, got {} fields", toks.len()),
            })
        }
    };
    if amp.norm_sqr() == 0.0 {
        return Err(ParseError::ZeroAmplitude { line });
    }
    Ok((bits, amp))
}

/// Parses a state file; terms keep file order.
pub fn parse_state_file(text: &str) -> Result<SparseState, ParseError> {
    let mut terms: Vec<(BasisState, Complex64)> = Vec::new();
    let mut lines_of: Vec<usize> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let (bits, amp) = parse_line(&toks, line)?;
        if let Some((first_bits, _)) = terms.first() {
            if bits.len() != first_bits.len() {
                return Err(ParseError::Length {
                    line,
                    first_line: lines_of[0],
                    expected: first_bits.len(),
                    got: bits.len(),
                });
            }
        }
        if let Some(&first_line) = seen.get(&bits) {
            return Err(ParseError::Duplicate {
                line,
                first_line,
                bits: bits.to_string(),
            });
        }
        seen.insert(bits.clone(), line);
        terms.push((bits, amp));
        lines_of.push(line);
    }
    let n = terms.first().ok_or(ParseError::Empty)?.0.len();
    // every invariant was checked above with line numbers
    Ok(SparseState::new(n, terms).expect("validated state"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verified {
    Passed,
    Failed,
    /// More than [`MAX_QUBITS`] qubits.
    Skipped,
    NotRequested,
}

impl fmt::Display for Verified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verified::Passed => "true",
            Verified::Failed => "false",
            Verified::Skipped => "skipped",
            Verified::NotRequested => "not-run",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tree: String,
    pub s: usize,
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub ccx_count: usize,
    #[serde(flatten)]
    pub resources: ResourceReport,
    pub input_norm: f64,
    pub verified: Verified,
    pub max_amplitude_error: Option<f64>,
}

impl Report {
    pub fn new(state: &SparseState, result: &SynthesisResult, strategy: TreeStrategy) -> Self {
        Report {
            tree: strategy.name().to_string(),
            s: state.sparsity(),
            n: state.num_qubits(),
            m: result.circuit.num_qubits,
            rank: result.trace.rank,
            ccx_count: result.ccx_count(),
            resources: result.circuit.resource_report(),
            input_norm: state.norm(),
            verified: Verified::NotRequested,
            max_amplitude_error: None,
        }
    }

    /// Runs the simulator check if the circuit is small enough.
    pub fn verify(
        &mut self,
        state: &SparseState,
        result: &SynthesisResult,
    ) -> Result<(), SynthesisError> {
        if result.circuit.num_qubits > MAX_QUBITS {
            self.verified = Verified::Skipped;
            return Ok(());
        }
        let cmp = result.verify(state, CompareMode::Exact, VERIFY_TOL)?;
        self.max_amplitude_error = Some(cmp.max_amplitude_error);
        self.verified = if cmp.pass {
            Verified::Passed
        } else {
            Verified::Failed
        };
        Ok(())
    }

    /// One `key=value` per line.
    pub fn to_text(&self) -> String {
        let r = &self.resources;
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| writeln!(out, "{k}={v}").unwrap();
        kv("tree", &self.tree);
        kv("s", &self.s);
        kv("n", &self.n);
        kv("m", &self.m);
        kv("rank", &self.rank);
        kv("ccx_count", &self.ccx_count);
        kv("ancillas", &r.ancillas);
        kv("size", &r.size);
        kv("depth", &r.depth);
        kv("non_clifford", &r.non_clifford);
        kv("non_clifford_t", &r.non_clifford_t);
        kv("t_count_estimate", &r.t_count_estimate);
        kv("input_norm", &format!("{:.12e}", self.input_norm));
        kv("verified", &self.verified);
        if let Some(e) = self.max_amplitude_error {
            kv("max_amplitude_error", &format!("{e:.3e}"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap() + "\n"
    }
}

/// Everything a single compilation produces.
pub struct Compiled {
    pub result: SynthesisResult,
    pub report: Report,
    pub qasm: String,
}

pub fn compile(
    state: &SparseState,
    strategy: TreeStrategy,
    verify: bool,
    qasm: QasmOptions,
) -> Result<Compiled, SynthesisError> {
    let result = synthesize(state, strategy)?;
    let mut report = Report::new(state, &result, strategy);
    if verify {
        report.verify(state, &result)?;
    }
    let qasm = to_qasm_with(&result.circuit, qasm);
    Ok(Compiled {
        result,
        report,
        qasm,
    })
}

/// Random state on 1..=6 qubits with 1..=min(2^n, 12) terms, moduli in
/// [0.1, 1] and uniform phases.
pub fn random_state(rng: &mut ChaCha8Rng) -> SparseState {
    let n = rng.gen_range(1..=6);
    let s = rng.gen_range(1..=(1usize << n).min(12));
    let terms = sample(rng, 1 << n, s)
        .into_iter()
        .map(|i| {
            let amp = Complex64::from_polar(
                rng.gen_range(0.1..1.0),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            );
            (BasisState(index_to_bits(i, n)), amp)
        })
        .collect();
    SparseState::new(n, terms).expect("distinct nonzero terms")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestLine {
    pub trial: usize,
    pub n: usize,
    pub s: usize,
    pub report: Report,
}

impl fmt::Display for SelfTestLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        write!(
            f,
            "trial={} n={} s={} m={} rank={} ccx={} size={} depth={} non_clifford={} verified={}",
            self.trial,
            self.n,
            self.s,
            r.m,
            r.rank,
            r.ccx_count,
            r.resources.size,
            r.resources.depth,
            r.resources.non_clifford,
            r.verified
        )?;
        if let Some(e) = r.max_amplitude_error {
            write!(f, " err={e:.1e}")?;
        }
        Ok(())
    }
}

/// Compiles and verifies `count` random states drawn from `seed`.
pub fn self_test(
    seed: u64,
    count: usize,
    strategy: TreeStrategy,
) -> Result<Vec<SelfTestLine>, SynthesisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|trial| {
            let state = random_state(&mut rng);
            let c = compile(&state, strategy, true, QasmOptions::default())?;
            Ok(SelfTestLine {
                trial,
                n: state.num_qubits(),
                s: state.sparsity(),
                report: c.report,
            })
        })
        .collect()
}
