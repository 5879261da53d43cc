//! Dense statevector simulation and brute-force stabilizer nullity.
//!
//! Qubit 0 is the leftmost character of a bitstring and the most
//! significant bit of an amplitude index.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

pub const MAX_QUBITS: usize = 20;
pub const MAX_NULLITY_QUBITS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{0} qubits exceed the simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("circuit has {circuit} qubits but the state has {state}")]
    QubitMismatch { circuit: usize, state: usize },
    #[error("expected {expected} amplitudes, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("states have {0} and {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("stabilizer enumeration is limited to {MAX_NULLITY_QUBITS} qubits, got {0}")]
    NullityTooLarge(usize),
    #[error("stabilizer group check failed: {0}")]
    NotAGroup(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero(num_qubits: usize) -> Result<Self, SimError> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(num_qubits));
        }
        let mut amps = vec![Complex64::default(); 1 << num_qubits];
        amps[index] = c(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Basis state with qubit `q` set to `bits[q]`.
    pub fn from_bits(bits: &[bool]) -> Result<Self, SimError> {
        Self::basis(bits.len(), bits_to_index(bits))
    }

    /// Takes amplitudes as given; callers normalize if they need to.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(num_qubits));
        }
        if amps.len() != 1 << num_qubits {
            return Err(SimError::BadLength {
                expected: 1 << num_qubits,
                got: amps.len(),
            });
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &[bool]) -> Complex64 {
        self.amps[bits_to_index(bits)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `self ⊗ other`, with `self` on the low-numbered qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, SimError> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    fn apply_1q(&mut self, controls: &[usize], target: usize, m: &Mat2) {
        let t = self.bit(target);
        let cmask: usize = controls.iter().map(|&q| self.bit(q)).sum();
        for i in 0..self.amps.len() {
            if i & t != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | t;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply(&mut self, g: &Gate) {
        use std::f64::consts::FRAC_1_SQRT_2 as R;
        use std::f64::consts::FRAC_PI_4;
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let x: Mat2 = [[zero, one], [one, zero]];
        let h: Mat2 = [[c(R, 0.0), c(R, 0.0)], [c(R, 0.0), c(-R, 0.0)]];
        let ry = |t: f64| -> Mat2 {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        };
        let ph = |p: f64| -> Mat2 { [[one, zero], [zero, Complex64::from_polar(1.0, p)]] };
        match *g {
            Gate::X(q) => self.apply_1q(&[], q, &x),
            Gate::CX(a, b) => self.apply_1q(&[a], b, &x),
            Gate::CCX(a, b, t) => self.apply_1q(&[a, b], t, &x),
            Gate::RY(q, t) => self.apply_1q(&[], q, &ry(t)),
            Gate::CRY(a, b, t) => self.apply_1q(&[a], b, &ry(t)),
            Gate::Phase(q, p) => self.apply_1q(&[], q, &ph(p)),
            Gate::H(q) => self.apply_1q(&[], q, &h),
            Gate::CH(a, b) => self.apply_1q(&[a], b, &h),
            Gate::T(q) => self.apply_1q(&[], q, &ph(FRAC_PI_4)),
            Gate::Tdg(q) => self.apply_1q(&[], q, &ph(-FRAC_PI_4)),
            Gate::S(q) => self.apply_1q(&[], q, &[[one, zero], [zero, c(0.0, 1.0)]]),
            Gate::Sdg(q) => self.apply_1q(&[], q, &[[one, zero], [zero, c(0.0, -1.0)]]),
            Gate::Z(q) => self.apply_1q(&[], q, &[[one, zero], [zero, -one]]),
        }
    }
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn index_to_bits(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|q| index >> (n - 1 - q) & 1 == 1).collect()
}

/// Applies every gate of `c` to `input` in order.
pub fn run(c: &Circuit, input: &StateVector) -> Result<StateVector, SimError> {
    if c.num_qubits != input.num_qubits {
        return Err(SimError::QubitMismatch {
            circuit: c.num_qubits,
            state: input.num_qubits,
        });
    }
    let mut v = input.clone();
    for g in &c.gates {
        v.apply(g);
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    Exact,
    GlobalPhase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub max_amplitude_error: f64,
    pub pass: bool,
}

/// Largest per-amplitude difference, after aligning `a`'s global phase to
/// `b` in [`CompareMode::GlobalPhase`].
pub fn compare_states(
    a: &StateVector,
    b: &StateVector,
    mode: CompareMode,
    tol: f64,
) -> Result<Comparison, SimError> {
    if a.num_qubits != b.num_qubits {
        return Err(SimError::SizeMismatch(a.num_qubits, b.num_qubits));
    }
    let phase = match mode {
        CompareMode::Exact => c(1.0, 0.0),
        CompareMode::GlobalPhase => {
            let ip = a.inner(b);
            if ip.norm() > 1e-300 {
                ip / ip.norm()
            } else {
                c(1.0, 0.0)
            }
        }
    };
    let err = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max);
    Ok(Comparison {
        max_amplitude_error: err,
        pass: err <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Power of i: 0 → +1, 1 → +i, 2 → −1, 3 → −i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub sign: u8,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, sign: u8) -> Self {
        Self {
            letters,
            sign: sign % 4,
        }
    }

    /// The `k`-th unsigned string in base-4 order, qubit 0 most significant.
    pub fn from_index(n: usize, k: usize) -> Self {
        let letters = (0..n)
            .map(|q| match k >> (2 * (n - 1 - q)) & 3 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        Self { letters, sign: 0 }
    }

    pub fn sign_value(&self) -> Complex64 {
        [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][self.sign as usize]
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        let n = v.num_qubits;
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut ys = 0u32;
        for (q, p) in self.letters.iter().enumerate() {
            let b = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= b,
                Pauli::Z => zmask |= b,
                Pauli::Y => {
                    flip |= b;
                    zmask |= b;
                    ys += 1;
                }
            }
        }
        // Y = i·X·Z, so the string is i^ys · X-part · Z-part.
        let global = self.sign_value() * c(0.0, 1.0).powu(ys);
        let mut out = vec![Complex64::default(); v.amps.len()];
        for (i, a) in v.amps.iter().enumerate() {
            let z = if (i & zmask).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[i ^ flip] = a * z * global;
        }
        StateVector {
            num_qubits: n,
            amps: out,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.sign as usize])?;
        for p in &self.letters {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

/// Every signed Pauli string fixing `v`, found by brute force.
pub fn stabilizers(v: &StateVector) -> Result<Vec<PauliString>, SimError> {
    let n = v.num_qubits;
    if n > MAX_NULLITY_QUBITS {
        return Err(SimError::NullityTooLarge(n));
    }
    let mut found = Vec::new();
    for k in 0..1usize << (2 * n) {
        let base = PauliString::from_index(n, k);
        for sign in 0..4 {
            let p = PauliString::new(base.letters.clone(), sign);
            let w = p.apply(v);
            let ok = compare_states(&w, v, CompareMode::Exact, 1e-10)?.pass;
            if ok {
                found.push(p);
            }
        }
    }
    Ok(found)
}

/// ν(v) = n − log₂|Stab(v)|.
pub fn stabilizer_nullity(v: &StateVector) -> Result<usize, SimError> {
    let stab = stabilizers(v)?;
    if let Some(p) = stab.iter().find(|p| p.sign % 2 == 1) {
        return Err(SimError::NotAGroup(format!("imaginary stabilizer {p}")));
    }
    let size = stab.len();
    if !size.is_power_of_two() {
        return Err(SimError::NotAGroup(format!("{size} elements")));
    }
    Ok(v.num_qubits - size.trailing_zeros() as usize)
}
