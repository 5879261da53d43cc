//! Weighted W-states from binary trees.
//!
//! A tree with leaves `(w_k, φ_k)` yields a circuit taking `|1 0…0⟩` to
//! `Σ_k √(w_k / Σw) e^{iφ_k} |e_k⟩`, where `e_k` has its single 1 at qubit
//! `k`. Each internal node splits the excitation between its two children
//! with an `F_p` block, `p = w(right) / w(node)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

/// Tolerance on `p` for balance tests and `F_p` classification.
pub const P_TOL: f64 = 1e-12;
/// Leaf phases closer than this to a multiple of 2π emit no gate.
pub const PHASE_TOL: f64 = 1e-12;
pub const MAX_EXHAUSTIVE_LEAVES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WError {
    #[error("at least one leaf is required")]
    Empty,
    #[error("{weights} weights but {phases} phases")]
    LengthMismatch { weights: usize, phases: usize },
    #[error("leaf {index} has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("leaf at position {position} has index {index}; leaves must be numbered left to right")]
    LeafOrder { position: usize, index: usize },
    #[error("p = {0} lies outside [0, 1]")]
    POutOfRange(f64),
    #[error("exhaustive search supports at most {MAX_EXHAUSTIVE_LEAVES} leaves, got {0}")]
    TooManyLeaves(usize),
    #[error("unknown tree strategy {0:?}")]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WTree {
    Leaf {
        index: usize,
        weight: f64,
        phase: f64,
    },
    Node {
        left: Box<WTree>,
        right: Box<WTree>,
    },
}

impl WTree {
    pub fn leaf(index: usize, weight: f64, phase: f64) -> Self {
        WTree::Leaf {
            index,
            weight,
            phase,
        }
    }

    pub fn node(left: WTree, right: WTree) -> Self {
        WTree::Node {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            WTree::Leaf { weight, .. } => *weight,
            WTree::Node { left, right } => left.weight() + right.weight(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            WTree::Leaf { .. } => 1,
            WTree::Node { left, right } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            WTree::Leaf { .. } => 0,
            WTree::Node { left, right } => 1 + left.height().max(right.height()),
        }
    }

    /// `(index, weight, phase)` in left-to-right order.
    pub fn leaves(&self) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<(usize, f64, f64)>) {
        match self {
            WTree::Leaf {
                index,
                weight,
                phase,
            } => out.push((*index, *weight, *phase)),
            WTree::Node { left, right } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    /// Checks positive weights and leaf indices `0..ℓ` in order.
    pub fn validate(&self) -> Result<(), WError> {
        for (pos, (index, weight, _)) in self.leaves().into_iter().enumerate() {
            if weight <= 0.0 || !weight.is_finite() {
                return Err(WError::NonPositiveWeight { index, weight });
            }
            if index != pos {
                return Err(WError::LeafOrder {
                    position: pos,
                    index,
                });
            }
        }
        Ok(())
    }

    /// Target amplitude of each output qubit.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let total = self.weight();
        self.leaves()
            .into_iter()
            .map(|(_, w, phi)| Complex64::from_polar((w / total).sqrt(), phi))
            .collect()
    }

    /// Renumbers leaves left to right, returning the old indices in order.
    fn renumber(self) -> (WTree, Vec<usize>) {
        let mut order = Vec::new();
        let t = self.renumber_from(&mut order);
        (t, order)
    }

    fn renumber_from(self, order: &mut Vec<usize>) -> WTree {
        match self {
            WTree::Leaf {
                index,
                weight,
                phase,
            } => {
                let t = WTree::leaf(order.len(), weight, phase);
                order.push(index);
                t
            }
            WTree::Node { left, right } => {
                let l = left.renumber_from(order);
                let r = right.renumber_from(order);
                WTree::node(l, r)
            }
        }
    }
}

impl fmt::Display for WTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WTree::Leaf { weight, .. } => write!(f, "{weight}"),
            WTree::Node { left, right } => write!(f, "({left},{right})"),
        }
    }
}

fn check_leaves(weights: &[f64], phases: &[f64]) -> Result<(), WError> {
    if weights.is_empty() {
        return Err(WError::Empty);
    }
    if weights.len() != phases.len() {
        return Err(WError::LengthMismatch {
            weights: weights.len(),
            phases: phases.len(),
        });
    }
    for (index, &weight) in weights.iter().enumerate() {
        if weight <= 0.0 || !weight.is_finite() {
            return Err(WError::NonPositiveWeight { index, weight });
        }
    }
    Ok(())
}

/// Leaves in the left subtree of the complete tree on `n ≥ 2` leaves.
fn complete_split(n: usize) -> usize {
    if n == 2 {
        return 1;
    }
    let h = n.next_power_of_two().trailing_zeros();
    (1usize << (h - 1)).min(n - (1 << (h - 2)))
}

/// The complete tree with last-level leaves flushed left.
pub fn complete_tree(weights: &[f64], phases: &[f64]) -> Result<WTree, WError> {
    check_leaves(weights, phases)?;
    fn build(weights: &[f64], phases: &[f64], offset: usize) -> WTree {
        if weights.len() == 1 {
            return WTree::leaf(offset, weights[0], phases[0]);
        }
        let k = complete_split(weights.len());
        WTree::node(
            build(&weights[..k], &phases[..k], offset),
            build(&weights[k..], &phases[k..], offset + k),
        )
    }
    Ok(build(weights, phases, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FpClass {
    Clifford,
    CliffordT,
    General,
}

pub fn fp_classify(p: f64, tol: f64) -> Result<FpClass, WError> {
    if !(-tol..=1.0 + tol).contains(&p) {
        return Err(WError::POutOfRange(p));
    }
    Ok(if p.abs() <= tol || (1.0 - p).abs() <= tol {
        FpClass::Clifford
    } else if (p - 0.5).abs() <= tol {
        FpClass::CliffordT
    } else {
        FpClass::General
    })
}

/// `p = w(right) / w(node)` for an internal node, `None` for a leaf.
pub fn split_ratio(t: &WTree) -> Option<f64> {
    match t {
        WTree::Leaf { .. } => None,
        WTree::Node { left, right } => {
            let r = right.weight();
            Some(r / (left.weight() + r))
        }
    }
}

/// Gates of the `F_p` block splitting an excitation on `a` between `a` and
/// `b`, leaving amplitude `√(1-p)` on `a` and `√p` on `b`.
pub fn fp_block(a: usize, b: usize, w_left: f64, w_right: f64) -> Vec<Gate> {
    let p = w_right / (w_left + w_right);
    match fp_classify(p, P_TOL).expect("ratio of positive weights") {
        FpClass::Clifford if p < 0.5 => vec![],
        FpClass::Clifford => vec![Gate::CX(a, b), Gate::CX(b, a)],
        FpClass::CliffordT => vec![Gate::CH(a, b), Gate::CX(b, a)],
        FpClass::General => {
            let theta = 2.0 * w_right.sqrt().atan2(w_left.sqrt());
            vec![Gate::CRY(a, b, theta), Gate::CX(b, a)]
        }
    }
}

/// Circuit on `ℓ(t)` qubits; the excitation enters on qubit 0.
///
/// Node blocks come in preorder, so sibling subtrees share layers.
pub fn build_w_circuit(t: &WTree) -> Circuit {
    fn emit(t: &WTree, base: usize, gates: &mut Vec<Gate>) {
        match t {
            WTree::Leaf { phase, .. } => {
                let r = phase.rem_euclid(TAU);
                if r.min(TAU - r) >= PHASE_TOL {
                    gates.push(Gate::Phase(base, *phase));
                }
            }
            WTree::Node { left, right } => {
                let b = base + left.leaf_count();
                gates.extend(fp_block(base, b, left.weight(), right.weight()));
                emit(left, base, gates);
                emit(right, b, gates);
            }
        }
    }
    let mut c = Circuit::new(t.leaf_count());
    emit(t, 0, &mut c.gates);
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeMetrics {
    pub height: usize,
    pub node_count: usize,
    pub leaf_count: usize,
    pub unbalanced_count: usize,
}

fn is_balanced(w_left: f64, w_right: f64) -> bool {
    (w_right / (w_left + w_right) - 0.5).abs() <= P_TOL
}

pub fn tree_metrics(t: &WTree) -> TreeMetrics {
    fn unbalanced(t: &WTree) -> usize {
        match t {
            WTree::Leaf { .. } => 0,
            WTree::Node { left, right } => {
                let own = !is_balanced(left.weight(), right.weight()) as usize;
                own + unbalanced(left) + unbalanced(right)
            }
        }
    }
    let leaf_count = t.leaf_count();
    TreeMetrics {
        height: t.height(),
        node_count: 2 * leaf_count - 1,
        leaf_count,
        unbalanced_count: unbalanced(t),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum TreeStrategy {
    /// Complete tree in input order.
    #[default]
    Complete,
    /// Complete tree over leaves sorted by ascending weight.
    SortedComplete,
    /// Merge equal-weight subtrees when possible, else the two lightest.
    GreedyPair,
    /// Minimum unbalanced nodes, then minimum height.
    Exhaustive,
}

impl TreeStrategy {
    pub const ALL: [TreeStrategy; 4] = [
        TreeStrategy::Complete,
        TreeStrategy::SortedComplete,
        TreeStrategy::GreedyPair,
        TreeStrategy::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeStrategy::Complete => "complete",
            TreeStrategy::SortedComplete => "sorted",
            TreeStrategy::GreedyPair => "greedy",
            TreeStrategy::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for TreeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeStrategy {
    type Err = WError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(TreeStrategy::Complete),
            "sorted" | "sorted-complete" => Ok(TreeStrategy::SortedComplete),
            "greedy" | "greedy-pair" => Ok(TreeStrategy::GreedyPair),
            "exhaustive" => Ok(TreeStrategy::Exhaustive),
            other => Err(WError::UnknownStrategy(other.to_string())),
        }
    }
}

/// A tree whose leaf at position `k` carries input term `leaf_order[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedTree {
    pub tree: WTree,
    pub leaf_order: Vec<usize>,
}

pub fn optimize_tree(
    weights: &[f64],
    phases: &[f64],
    strategy: TreeStrategy,
) -> Result<OptimizedTree, WError> {
    check_leaves(weights, phases)?;
    let n = weights.len();
    let tree = match strategy {
        TreeStrategy::Complete => complete_tree(weights, phases)?,
        TreeStrategy::SortedComplete => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]));
            let w: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
            let p: Vec<f64> = idx.iter().map(|&i| phases[i]).collect();
            let t = complete_tree(&w, &p)?;
            return Ok(OptimizedTree {
                tree: t,
                leaf_order: idx,
            });
        }
        TreeStrategy::GreedyPair => greedy_pair(weights, phases),
        TreeStrategy::Exhaustive => {
            if n > MAX_EXHAUSTIVE_LEAVES {
                return Err(WError::TooManyLeaves(n));
            }
            exhaustive(weights, phases)
        }
    };
    let (tree, leaf_order) = tree.renumber();
    Ok(OptimizedTree { tree, leaf_order })
}

fn greedy_pair(weights: &[f64], phases: &[f64]) -> WTree {
    let mut forest: Vec<(WTree, f64)> = weights
        .iter()
        .zip(phases)
        .enumerate()
        .map(|(i, (&w, &p))| (WTree::leaf(i, w, p), w))
        .collect();
    while forest.len() > 1 {
        let mut order: Vec<usize> = (0..forest.len()).collect();
        order.sort_by(|&a, &b| forest[a].1.total_cmp(&forest[b].1));
        let equal = order
            .windows(2)
            .find(|w| is_balanced(forest[w[0]].1, forest[w[1]].1))
            .map(|w| (w[0], w[1]));
        let (i, j) = equal.unwrap_or((order[0], order[1]));
        let (i, j) = (i.min(j), i.max(j));
        let (right, wr) = forest.remove(j);
        let (left, wl) = forest.remove(i);
        forest.insert(i, (WTree::node(left, right), wl + wr));
    }
    forest.pop().expect("nonempty forest").0
}

/// Subset DP over all full binary trees: cost is (unbalanced, height).
fn exhaustive(weights: &[f64], phases: &[f64]) -> WTree {
    let n = weights.len();
    let full = (1usize << n) - 1;
    let mut weight = vec![0.0; full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        weight[s] = weight[s & (s - 1)] + weights[low];
    }
    let mut cost = vec![(usize::MAX, usize::MAX); full + 1];
    let mut split = vec![0usize; full + 1];
    for s in 1..=full {
        if s.is_power_of_two() {
            cost[s] = (0, 0);
            continue;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        // a always holds the lowest member so each split is seen once
        let mut sub = rest;
        loop {
            let a = sub | low;
            let b = s ^ a;
            if b != 0 {
                let (ua, ha) = cost[a];
                let (ub, hb) = cost[b];
                let c = (
                    ua + ub + !is_balanced(weight[a], weight[b]) as usize,
                    1 + ha.max(hb),
                );
                if c < cost[s] {
                    cost[s] = c;
                    split[s] = a;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    fn build(s: usize, split: &[usize], weights: &[f64], phases: &[f64]) -> WTree {
        if s.is_power_of_two() {
            let i = s.trailing_zeros() as usize;
            return WTree::leaf(i, weights[i], phases[i]);
        }
        let a = split[s];
        WTree::node(
            build(a, split, weights, phases),
            build(s ^ a, split, weights, phases),
        )
    }
    build(full, &split, weights, phases)
}
