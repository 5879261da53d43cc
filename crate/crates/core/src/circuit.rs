//! Gate-level circuit IR and resource accounting.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gf2linalg::PermutationMap;

/// Tolerance used when deciding whether an angle is a multiple of π/4.
pub const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {gate} touches qubit {qubit} outside a {num_qubits}-qubit register")]
    QubitOutOfRange {
        gate: Gate,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("gate {0} uses a qubit twice")]
    RepeatedQubit(Gate),
    #[error("{ancillas} ancillas exceed the {num_qubits}-qubit register")]
    TooManyAncillas { ancillas: usize, num_qubits: usize },
    #[error("permutation of size {perm} does not match {num_qubits} qubits")]
    SizeMismatch { perm: usize, num_qubits: usize },
}

/// Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Gate {
    X(usize),
    CX(usize, usize),
    CCX(usize, usize, usize),
    RY(usize, f64),
    /// control, target, angle
    CRY(usize, usize, f64),
    Phase(usize, f64),
    H(usize),
    /// control, target
    CH(usize, usize),
    T(usize),
    Tdg(usize),
    S(usize),
    Sdg(usize),
    Z(usize),
}

/// Cheapest fault-tolerant gate set a gate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GateClass {
    Clifford,
    CliffordT,
    General,
}

/// True when `angle` is an integer multiple of `unit` up to [`ANGLE_TOL`].
pub fn is_multiple_of(angle: f64, unit: f64) -> bool {
    let k = (angle / unit).round();
    (angle - k * unit).abs() <= ANGLE_TOL
}

/// True when `angle` is an odd multiple of `unit` up to [`ANGLE_TOL`].
fn is_odd_multiple_of(angle: f64, unit: f64) -> bool {
    let k = (angle / unit).round();
    (angle - k * unit).abs() <= ANGLE_TOL && (k as i64).rem_euclid(2) == 1
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        use Gate::*;
        match *self {
            X(q) | RY(q, _) | Phase(q, _) | H(q) | T(q) | Tdg(q) | S(q) | Sdg(q) | Z(q) => vec![q],
            CX(a, b) | CRY(a, b, _) | CH(a, b) => vec![a, b],
            CCX(a, b, c) => vec![a, b, c],
        }
    }

    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Gate {
        use Gate::*;
        match *self {
            X(q) => X(f(q)),
            CX(a, b) => CX(f(a), f(b)),
            CCX(a, b, c) => CCX(f(a), f(b), f(c)),
            RY(q, t) => RY(f(q), t),
            CRY(a, b, t) => CRY(f(a), f(b), t),
            Phase(q, p) => Phase(f(q), p),
            H(q) => H(f(q)),
            CH(a, b) => CH(f(a), f(b)),
            T(q) => T(f(q)),
            Tdg(q) => Tdg(f(q)),
            S(q) => S(f(q)),
            Sdg(q) => Sdg(f(q)),
            Z(q) => Z(f(q)),
        }
    }

    pub fn class(&self) -> GateClass {
        use Gate::*;
        use GateClass::*;
        match *self {
            X(_) | CX(..) | H(_) | S(_) | Sdg(_) | Z(_) => Clifford,
            T(_) | Tdg(_) | CCX(..) | CH(..) => CliffordT,
            RY(_, t) => {
                if is_multiple_of(t, FRAC_PI_2) {
                    Clifford
                } else {
                    General
                }
            }
            CRY(_, _, t) => {
                if is_multiple_of(t, PI) {
                    Clifford
                } else if is_multiple_of(t, FRAC_PI_2) {
                    CliffordT
                } else {
                    General
                }
            }
            Phase(_, p) => {
                if is_multiple_of(p, FRAC_PI_2) {
                    Clifford
                } else if is_multiple_of(p, FRAC_PI_4) {
                    CliffordT
                } else {
                    General
                }
            }
        }
    }

    /// T-count of the fixed Clifford+T expansion used for accounting; zero
    /// for Clifford gates and for gates outside Clifford+T.
    pub fn t_cost(&self) -> usize {
        use Gate::*;
        match *self {
            CCX(..) => 7,
            CH(..) => 2,
            T(_) | Tdg(_) => 1,
            CRY(_, _, t) if is_odd_multiple_of(t, FRAC_PI_2) => 2,
            Phase(_, p) if is_odd_multiple_of(p, FRAC_PI_4) => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Gate::*;
        match *self {
            X(q) => write!(f, "X({q})"),
            CX(a, b) => write!(f, "CX({a},{b})"),
            CCX(a, b, c) => write!(f, "CCX({a},{b},{c})"),
            RY(q, t) => write!(f, "RY({q},{t})"),
            CRY(a, b, t) => write!(f, "CRY({a},{b},{t})"),
            Phase(q, p) => write!(f, "P({q},{p})"),
            H(q) => write!(f, "H({q})"),
            CH(a, b) => write!(f, "CH({a},{b})"),
            T(q) => write!(f, "T({q})"),
            Tdg(q) => write!(f, "Tdg({q})"),
            S(q) => write!(f, "S({q})"),
            Sdg(q) => write!(f, "Sdg({q})"),
            Z(q) => write!(f, "Z({q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    /// Qubits `num_qubits - num_initial_ancillas ..` start in |0⟩ and are
    /// returned to |0⟩, so they may be discarded.
    pub num_initial_ancillas: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            num_initial_ancillas: 0,
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let c = Self {
            num_qubits,
            gates,
            num_initial_ancillas: 0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) {
        self.gates.extend(gates);
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.num_initial_ancillas > self.num_qubits {
            return Err(CircuitError::TooManyAncillas {
                ancillas: self.num_initial_ancillas,
                num_qubits: self.num_qubits,
            });
        }
        for g in &self.gates {
            let qs = g.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= self.num_qubits) {
                return Err(CircuitError::QubitOutOfRange {
                    gate: *g,
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            for (i, q) in qs.iter().enumerate() {
                if qs[i + 1..].contains(q) {
                    return Err(CircuitError::RepeatedQubit(*g));
                }
            }
        }
        Ok(())
    }

    /// ASAP depth: every gate occupies one layer after the latest earlier
    /// gate sharing a qubit with it.
    pub fn depth(&self) -> usize {
        let mut front = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let layer = 1 + qs.iter().map(|&q| front[q]).max().unwrap_or(0);
            for &q in &qs {
                front[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    pub fn ccx_count(&self) -> usize {
        self.count(|g| matches!(g, Gate::CCX(..)))
    }

    pub fn resource_report(&self) -> ResourceReport {
        let mut r = ResourceReport {
            size: self.size(),
            depth: self.depth(),
            ancillas: self.num_initial_ancillas,
            ..Default::default()
        };
        for g in &self.gates {
            match g.class() {
                GateClass::Clifford => {}
                GateClass::CliffordT => r.non_clifford += 1,
                GateClass::General => {
                    r.non_clifford += 1;
                    r.non_clifford_t += 1;
                }
            }
            r.t_count_estimate += g.t_cost();
        }
        r
    }

    /// Relabels every qubit `q` as `perm.apply(q)`.
    pub fn remap_qubits(&self, perm: &PermutationMap) -> Result<Circuit, CircuitError> {
        if perm.len() != self.num_qubits {
            return Err(CircuitError::SizeMismatch {
                perm: perm.len(),
                num_qubits: self.num_qubits,
            });
        }
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| g.map_qubits(|q| perm.apply(q)))
                .collect(),
            num_initial_ancillas: self.num_initial_ancillas,
        })
    }

    /// Same circuit with CCX and CH replaced by their Clifford+T expansions.
    pub fn expand_clifford_t(&self) -> Circuit {
        let mut out = Circuit {
            gates: Vec::with_capacity(self.gates.len()),
            ..self.clone()
        };
        for g in &self.gates {
            match *g {
                Gate::CCX(a, b, c) => out.extend(ccx_clifford_t(a, b, c)),
                Gate::CH(a, b) => out.extend(ch_clifford_t(a, b)),
                other => out.push(other),
            }
        }
        out
    }
}

/// Metrics of a circuit.
///
/// `non_clifford` counts gates outside the Clifford group and
/// `non_clifford_t` those outside Clifford+T; the latter contribute nothing
/// to `t_count_estimate` since they need approximate synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ResourceReport {
    pub size: usize,
    pub depth: usize,
    pub non_clifford: usize,
    pub non_clifford_t: usize,
    pub t_count_estimate: usize,
    pub ancillas: usize,
}

/// Standard 7-T Toffoli.
pub fn ccx_clifford_t(a: usize, b: usize, c: usize) -> Vec<Gate> {
    use Gate::*;
    vec![
        H(c),
        CX(b, c),
        Tdg(c),
        CX(a, c),
        T(c),
        CX(b, c),
        Tdg(c),
        CX(a, c),
        T(b),
        T(c),
        H(c),
        CX(a, b),
        T(a),
        Tdg(b),
        CX(a, b),
    ]
}

/// Controlled-Hadamard with two T gates: `RY(π/4)`, CX, `RY(-π/4)` on the
/// target, each rotation written as `S H T† H S†` (resp. `T`).
pub fn ch_clifford_t(c: usize, t: usize) -> Vec<Gate> {
    use Gate::*;
    vec![
        S(t),
        H(t),
        Tdg(t),
        H(t),
        Sdg(t),
        CX(c, t),
        S(t),
        H(t),
        T(t),
        H(t),
        Sdg(t),
    ]
}

/// CRY through single-qubit rotations and CX.
pub fn cry_decomposed(c: usize, t: usize, theta: f64) -> Vec<Gate> {
    use Gate::*;
    vec![RY(t, theta / 2.0), CX(c, t), RY(t, -theta / 2.0), CX(c, t)]
}
