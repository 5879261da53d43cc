#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use sparseprep::simulator::index_to_bits;
use sparseprep::{BasisState, SparseState, WTree};

/// `s` distinct bitstrings on `n` qubits with moduli in [0.1, 1] and
/// uniform phases.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, s: usize) -> SparseState {
    let terms = sample(rng, 1 << n, s)
        .into_iter()
        .map(|i| {
            let a = Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(-PI..PI));
            (BasisState(index_to_bits(i, n)), a)
        })
        .collect();
    SparseState::new(n, terms).unwrap()
}

pub fn uniform_state<R: Rng>(rng: &mut R, n: usize, s: usize) -> SparseState {
    let terms = sample(rng, 1 << n, s)
        .into_iter()
        .map(|i| (BasisState(index_to_bits(i, n)), Complex64::new(1.0, 0.0)))
        .collect();
    SparseState::new(n, terms).unwrap()
}

/// Random full binary tree shape over `n` leaves with random weights and
/// phases; leaves are numbered left to right.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> WTree {
    fn go<R: Rng>(rng: &mut R, n: usize, offset: usize) -> WTree {
        if n == 1 {
            return WTree::leaf(offset, rng.gen_range(0.05..2.0), rng.gen_range(-PI..PI));
        }
        let k = rng.gen_range(1..n);
        let left = go(rng, k, offset);
        let right = go(rng, n - k, offset + k);
        WTree::node(left, right)
    }
    go(rng, n, 0)
}

/// The six-term, four-qubit example state with the given moduli and phases.
pub fn worked_state(rho: [f64; 6], theta: [f64; 6]) -> SparseState {
    let bits = ["0000", "0001", "0110", "1011", "1110", "1111"];
    let terms = bits
        .iter()
        .zip(rho.iter().zip(theta))
        .map(|(b, (&r, t))| (b.parse().unwrap(), Complex64::from_polar(r, t)))
        .collect();
    SparseState::new(4, terms).unwrap()
}

pub fn worked_state_uniform() -> SparseState {
    worked_state([1.0; 6], [0.0; 6])
}
