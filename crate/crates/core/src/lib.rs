//! Sparse quantum state preparation.
//!
//! A state with `s` nonzero amplitudes over `n` qubits is compiled in two
//! stages: a weighted W-state on `s` qubits built from a binary tree of
//! `F_p` splitting blocks, followed by a classical reversible circuit of
//! X / CX / CCX gates that moves the W-state's basis states onto the target
//! bitstrings. The reversible part comes from a GF(2) LU factorization whose
//! factors are eliminated one anti-diagonal per round, so depth stays linear
//! and the CCX count equals the rank deficit of the basis matrix.
//!
//! Every circuit can be checked against the dense statevector simulator in
//! [`simulator`].

pub mod circuit;
pub mod gf2linalg;
pub mod qasm;
pub mod simulator;
pub mod synthesis;
pub mod wstate;

pub use circuit::{Circuit, Gate, ResourceReport};
pub use gf2linalg::{BitMatrix, LuFactorization, OpSchedule, PermutationMap, RowOp};
pub use simulator::StateVector;
pub use synthesis::{synthesize, BasisState, SparseState, SynthesisResult};
pub use wstate::{TreeStrategy, WTree};


