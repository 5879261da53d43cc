//! End-to-end synthesis of sparse states.
//!
//! The basis bitstrings are stacked as columns of an `m × s` matrix
//! (`m = max(s, n)`). Row operations taking that matrix to the identity
//! block are found from its LU factors; read as X / CX / CCX gates and run
//! backwards, they carry the W-state `Σ_j β_j |e_j⟩` onto the target.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, ResourceReport};
use crate::gf2linalg::{
    lower_elim, lu_decompose, rank, up_elim_comp, BitMatrix, Gf2Error, LuFactorization,
    OpSchedule, PermutationMap, RowOp, UpperElimination,
};
use crate::simulator::{self, CompareMode, Comparison, SimError, StateVector};
use crate::wstate::{build_w_circuit, optimize_tree, TreeStrategy, WError, WTree, PHASE_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("state has no terms")]
    Empty,
    #[error("state must have at least one qubit")]
    NoQubits,
    #[error("term {term} has {got} bits, expected {expected}")]
    LengthMismatch {
        term: usize,
        expected: usize,
        got: usize,
    },
    #[error("terms {first} and {second} share the bitstring {bits}")]
    Duplicate {
        first: usize,
        second: usize,
        bits: BasisState,
    },
    #[error("term {0} has zero amplitude")]
    ZeroAmplitude(usize),
    #[error("term {0} has a non-finite amplitude")]
    NonFinite(usize),
    #[error("invalid bit character {0:?}")]
    BadBit(char),
    #[error("no row can be flipped to remove the zero column")]
    NoPreprocessRow,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    WState(#[from] WError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A computational basis state; bit `q` belongs to qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(pub Vec<bool>);

impl BasisState {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }
}

impl FromStr for BasisState {
    type Err = SynthesisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SynthesisError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BasisState)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BasisState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `Σ_k α_k |x_k⟩`; amplitudes need not be normalized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseState {
    num_qubits: usize,
    terms: Vec<(BasisState, Complex64)>,
}

impl SparseState {
    pub fn new(
        num_qubits: usize,
        terms: Vec<(BasisState, Complex64)>,
    ) -> Result<Self, SynthesisError> {
        if num_qubits == 0 {
            return Err(SynthesisError::NoQubits);
        }
        if terms.is_empty() {
            return Err(SynthesisError::Empty);
        }
        let mut seen = std::collections::HashMap::new();
        for (k, (x, a)) in terms.iter().enumerate() {
            if x.len() != num_qubits {
                return Err(SynthesisError::LengthMismatch {
                    term: k,
                    expected: num_qubits,
                    got: x.len(),
                });
            }
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(SynthesisError::NonFinite(k));
            }
            if a.norm_sqr() == 0.0 {
                return Err(SynthesisError::ZeroAmplitude(k));
            }
            if let Some(&first) = seen.get(x) {
                return Err(SynthesisError::Duplicate {
                    first,
                    second: k,
                    bits: x.clone(),
                });
            }
            seen.insert(x.clone(), k);
        }
        Ok(Self { num_qubits, terms })
    }

    /// Convenience constructor from bitstring literals.
    pub fn from_pairs(pairs: &[(&str, Complex64)]) -> Result<Self, SynthesisError> {
        let terms = pairs
            .iter()
            .map(|(s, a)| Ok((s.parse::<BasisState>()?, *a)))
            .collect::<Result<Vec<_>, SynthesisError>>()?;
        let n = terms.first().map_or(0, |(x, _)| x.len());
        Self::new(n, terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(BasisState, Complex64)] {
        &self.terms
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized_amplitudes(&self) -> Vec<Complex64> {
        let norm = self.norm();
        self.terms.iter().map(|(_, a)| a / norm).collect()
    }

    /// Dense normalized state with `ancillas` extra qubits in |0⟩ at the end.
    pub fn to_statevector(&self, ancillas: usize) -> Result<StateVector, SimError> {
        let n = self.num_qubits + ancillas;
        if n > simulator::MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let mut amps = vec![Complex64::default(); 1 << n];
        for ((x, _), a) in self.terms.iter().zip(self.normalized_amplitudes()) {
            amps[simulator::bits_to_index(x.bits()) << ancillas] = a;
        }
        StateVector::from_amplitudes(n, amps)
    }
}

/// Columns are the basis states, rows `n..m` are zero padding.
pub fn build_basis_matrix(state: &SparseState) -> BitMatrix {
    let (n, s) = (state.num_qubits, state.sparsity());
    let m = n.max(s);
    let mut out = BitMatrix::zeros(m, s);
    for (k, (x, _)) in state.terms.iter().enumerate() {
        for (q, &b) in x.bits().iter().enumerate() {
            out.set(q, k, b);
        }
    }
    out
}

/// Removes a zero column by complementing the smallest row `i` for which no
/// column equals `e_i`.
pub fn preprocess_zero_column(
    m: &BitMatrix,
) -> Result<(BitMatrix, Option<usize>), SynthesisError> {
    if !(0..m.cols()).any(|c| m.column_is_zero(c)) {
        return Ok((m.clone(), None));
    }
    let cols = m.columns();
    let is_unit = |col: &Vec<bool>, i: usize| col.iter().enumerate().all(|(r, &b)| b == (r == i));
    let i = (0..m.rows())
        .find(|&i| !cols.iter().any(|c| is_unit(c, i)))
        .ok_or(SynthesisError::NoPreprocessRow)?;
    let mut out = m.clone();
    out.flip_row(i);
    Ok((out, Some(i)))
}

pub fn schedule_to_gates(s: &OpSchedule) -> Vec<Gate> {
    s.ops()
        .map(|op| match *op {
            RowOp::FlipRow(i) => Gate::X(i),
            RowOp::AddRow { src, dst } => Gate::CX(src, dst),
            RowOp::AndAddRow { src1, src2, dst } => Gate::CCX(src1, src2, dst),
        })
        .collect()
}

/// Intermediate objects of a synthesis run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisTrace {
    pub matrix: BitMatrix,
    pub preprocess_x: Option<usize>,
    pub preprocessed: BitMatrix,
    pub rank: usize,
    /// Absent for single-term states, which skip elimination.
    pub lu: Option<LuFactorization>,
    pub lower: OpSchedule,
    pub upper: UpperElimination,
    /// `lower` and `upper` relabelled through the row permutation.
    pub lower_remapped: OpSchedule,
    pub upper_remapped: OpSchedule,
    pub tree: WTree,
    /// Tree leaf `k` carries coefficient `leaf_order[k]` of the permuted list.
    pub leaf_order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    pub ancilla_count: usize,
    /// W-state qubit `j` (before relabelling) carries term `coeff_perm[j]`.
    pub coeff_perm: PermutationMap,
    pub report: ResourceReport,
    pub trace: SynthesisTrace,
}

impl SynthesisResult {
    pub fn ccx_count(&self) -> usize {
        self.circuit.ccx_count()
    }

    /// Simulates the circuit from |0…0⟩ and compares with the normalized
    /// target, ancillas included.
    pub fn verify(
        &self,
        state: &SparseState,
        mode: CompareMode,
        tol: f64,
    ) -> Result<Comparison, SynthesisError> {
        let input = StateVector::zero(self.circuit.num_qubits)?;
        let out = simulator::run(&self.circuit, &input)?;
        let want = state.to_statevector(self.ancilla_count)?;
        Ok(simulator::compare_states(&out, &want, mode, tol)?)
    }
}

/// Compiles `state` into a circuit on `max(s, n)` qubits preparing it from
/// |0…0⟩, with the extra qubits returned to |0⟩.
pub fn synthesize(
    state: &SparseState,
    strategy: TreeStrategy,
) -> Result<SynthesisResult, SynthesisError> {
    let (n, s) = (state.num_qubits, state.sparsity());
    let m = n.max(s);
    let matrix = build_basis_matrix(state);
    let (preprocessed, preprocess_x) = preprocess_zero_column(&matrix)?;
    let amps = state.normalized_amplitudes();

    if s == 1 {
        return single_term(state, amps[0], matrix, preprocessed, preprocess_x, strategy);
    }

    let lu = lu_decompose(&preprocessed);
    let lower = lower_elim(&lu.l)?;
    let upper = up_elim_comp(&lu.u)?;
    let origin = upper.column_origin(s);
    let coeff_perm = lu.col_perm.compose(&origin);

    let permuted: Vec<Complex64> = (0..s).map(|j| amps[coeff_perm.apply(j)]).collect();
    let weights: Vec<f64> = permuted.iter().map(|a| a.norm_sqr()).collect();
    let phases: Vec<f64> = permuted.iter().map(|a| a.arg()).collect();
    let opt = optimize_tree(&weights, &phases, strategy)?;
    let w = build_w_circuit(&opt.tree);

    // Everything below runs on permuted qubits: qubit r carries original
    // qubit row_perm[r].
    let mut c = Circuit::new(m);
    c.push(Gate::X(opt.leaf_order[0]));
    c.extend(w.gates.iter().map(|g| g.map_qubits(|q| opt.leaf_order[q])));
    let forward = lower.concat(&upper.schedule);
    c.extend(schedule_to_gates(&forward.reversed()));
    let mut c = c.remap_qubits(&lu.row_perm)?;
    if let Some(i) = preprocess_x {
        c.push(Gate::X(i));
    }
    c.num_initial_ancillas = m - n;
    c.validate()?;

    let trace = SynthesisTrace {
        rank: lu.rank,
        lower_remapped: lower.remap(&lu.row_perm),
        upper_remapped: upper.schedule.remap(&lu.row_perm),
        matrix,
        preprocess_x,
        preprocessed,
        lu: Some(lu),
        lower,
        upper,
        tree: opt.tree,
        leaf_order: opt.leaf_order,
    };
    Ok(SynthesisResult {
        report: c.resource_report(),
        circuit: c,
        ancilla_count: m - n,
        coeff_perm,
        trace,
    })
}

/// X gates onto the bitstring with the phase applied on the first flipped
/// qubit, or sandwiched between two X when the bitstring is all zeros.
fn single_term(
    state: &SparseState,
    amp: Complex64,
    matrix: BitMatrix,
    preprocessed: BitMatrix,
    preprocess_x: Option<usize>,
    strategy: TreeStrategy,
) -> Result<SynthesisResult, SynthesisError> {
    let n = state.num_qubits;
    let phi = amp.arg();
    let opt = optimize_tree(&[1.0], &[phi], strategy)?;
    let x = &state.terms[0].0;
    let ones: Vec<usize> = (0..n).filter(|&q| x.bits()[q]).collect();
    let r = phi.rem_euclid(std::f64::consts::TAU);
    let has_phase = r.min(std::f64::consts::TAU - r) >= PHASE_TOL;

    let mut c = Circuit::new(n);
    match ones.split_first() {
        Some((&first, rest)) => {
            c.push(Gate::X(first));
            if has_phase {
                c.push(Gate::Phase(first, phi));
            }
            c.extend(rest.iter().map(|&q| Gate::X(q)));
        }
        None if has_phase => c.extend([Gate::X(0), Gate::Phase(0, phi), Gate::X(0)]),
        None => {}
    }
    c.validate()?;

    let trace = SynthesisTrace {
        rank: rank(&preprocessed),
        matrix,
        preprocess_x,
        preprocessed,
        lu: None,
        lower: OpSchedule::default(),
        upper: UpperElimination::default(),
        lower_remapped: OpSchedule::default(),
        upper_remapped: OpSchedule::default(),
        tree: opt.tree,
        leaf_order: opt.leaf_order,
    };
    Ok(SynthesisResult {
        report: c.resource_report(),
        circuit: c,
        ancilla_count: 0,
        coeff_perm: PermutationMap::identity(1),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn worked_state() -> SparseState {
        SparseState::from_pairs(&[
            ("0000", c(1.0)),
            ("0001", c(1.0)),
            ("0110", c(1.0)),
            ("1011", c(1.0)),
            ("1110", c(1.0)),
            ("1111", c(1.0)),
        ])
        .unwrap()
    }

    #[test]
    fn basis_matrix_layout() {
        let m = build_basis_matrix(&worked_state());
        let want = BitMatrix::from_rows(&[
            "000111", "001011", "001111", "010101", "000000", "000000",
        ])
        .unwrap();
        assert_eq!(m, want);
        let one = SparseState::from_pairs(&[("1", c(1.0))]).unwrap();
        assert_eq!(build_basis_matrix(&one), BitMatrix::from_rows(&["1"]).unwrap());
    }

    #[test]
    fn preprocessing_picks_smallest_row() {
        let (m, x) = preprocess_zero_column(&build_basis_matrix(&worked_state())).unwrap();
        assert_eq!(x, Some(0));
        assert_eq!(m.to_grid().lines().next(), Some("111000"));

        let id = BitMatrix::identity(3);
        assert_eq!(preprocess_zero_column(&id).unwrap(), (id, None));

        // columns e_1 and 0: row 0 is free
        let m = BitMatrix::from_rows(&["00", "10"]).unwrap();
        let (out, x) = preprocess_zero_column(&m).unwrap();
        assert_eq!(x, Some(0));
        assert_eq!(out, BitMatrix::from_rows(&["11", "10"]).unwrap());
    }

    #[test]
    fn gate_dictionary() {
        assert!(schedule_to_gates(&OpSchedule::default()).is_empty());
        let s = OpSchedule::new(vec![crate::gf2linalg::Round::single(RowOp::AddRow {
            src: 2,
            dst: 3,
        })]);
        assert_eq!(schedule_to_gates(&s), vec![Gate::CX(2, 3)]);
    }

    #[test]
    fn state_validation() {
        assert!(matches!(
            SparseState::from_pairs(&[("01", c(1.0)), ("01", c(2.0))]),
            Err(SynthesisError::Duplicate { first: 0, second: 1, .. })
        ));
        assert!(matches!(
            SparseState::from_pairs(&[("01", c(0.0))]),
            Err(SynthesisError::ZeroAmplitude(0))
        ));
        assert!(matches!(
            SparseState::from_pairs(&[("01", c(1.0)), ("1", c(1.0))]),
            Err(SynthesisError::LengthMismatch { term: 1, .. })
        ));
        assert!(matches!(SparseState::from_pairs(&[]), Err(SynthesisError::NoQubits)));
        assert!(matches!(
            "01x".parse::<BasisState>(),
            Err(SynthesisError::BadBit('x'))
        ));
    }

    #[test]
    fn worked_state_synthesizes() {
        let st = worked_state();
        let r = synthesize(&st, TreeStrategy::Complete).unwrap();
        assert_eq!(r.circuit.num_qubits, 6);
        assert_eq!(r.ancilla_count, 2);
        assert_eq!(r.ccx_count(), 2);
        let cmp = r.verify(&st, CompareMode::Exact, 1e-12).unwrap();
        assert!(cmp.pass, "{cmp:?}");
    }

    #[test]
    fn single_terms() {
        for (bits, amp) in [
            ("000", c(1.0)),
            ("000", Complex64::new(0.0, -2.0)),
            ("101", Complex64::from_polar(0.5, 1.0)),
        ] {
            let st = SparseState::from_pairs(&[(bits, amp)]).unwrap();
            let r = synthesize(&st, TreeStrategy::Complete).unwrap();
            assert_eq!(r.ancilla_count, 0);
            assert!(r.verify(&st, CompareMode::Exact, 1e-12).unwrap().pass, "{bits}");
        }
    }
}
