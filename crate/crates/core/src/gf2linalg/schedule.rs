use std::fmt;

use serde::Serialize;

use super::{BitMatrix, Gf2Error, PermutationMap};

/// Row operation on a GF(2) matrix; each one is the action of a classical
/// reversible gate on the basis states stored in the columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RowOp {
    /// `row[i] ^= 1…1` (X on qubit `i`)
    FlipRow(usize),
    /// `row[dst] ^= row[src]` (CX from `src` to `dst`)
    AddRow { src: usize, dst: usize },
    /// `row[dst] ^= row[src1] & row[src2]` (CCX onto `dst`)
    AndAddRow { src1: usize, src2: usize, dst: usize },
}

impl RowOp {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            RowOp::FlipRow(i) => vec![i],
            RowOp::AddRow { src, dst } => vec![src, dst],
            RowOp::AndAddRow { src1, src2, dst } => vec![src1, src2, dst],
        }
    }

    pub fn is_and(&self) -> bool {
        matches!(self, RowOp::AndAddRow { .. })
    }

    pub fn check(&self, rows: usize) -> Result<(), Gf2Error> {
        let idx = self.indices();
        if let Some(&bad) = idx.iter().find(|&&i| i >= rows) {
            return Err(Gf2Error::OutOfBounds { index: bad, rows });
        }
        for (a, x) in idx.iter().enumerate() {
            if idx[a + 1..].contains(x) {
                return Err(Gf2Error::RepeatedIndex(*self));
            }
        }
        Ok(())
    }

    pub fn apply(&self, m: &mut BitMatrix) -> Result<(), Gf2Error> {
        self.check(m.rows())?;
        match *self {
            RowOp::FlipRow(i) => m.flip_row(i),
            RowOp::AddRow { src, dst } => m.add_row(src, dst),
            RowOp::AndAddRow { src1, src2, dst } => m.and_add_row(src1, src2, dst),
        }
        Ok(())
    }

    pub fn remap(&self, perm: &PermutationMap) -> RowOp {
        let f = |i| perm.apply(i);
        match *self {
            RowOp::FlipRow(i) => RowOp::FlipRow(f(i)),
            RowOp::AddRow { src, dst } => RowOp::AddRow {
                src: f(src),
                dst: f(dst),
            },
            RowOp::AndAddRow { src1, src2, dst } => RowOp::AndAddRow {
                src1: f(src1),
                src2: f(src2),
                dst: f(dst),
            },
        }
    }
}

impl fmt::Display for RowOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowOp::FlipRow(i) => write!(f, "X_{i}"),
            RowOp::AddRow { src, dst } => write!(f, "CX_{{{src},{dst}}}"),
            RowOp::AndAddRow { src1, src2, dst } => write!(f, "CCX_{{{src1},{src2},{dst}}}"),
        }
    }
}

/// A set of row operations with pairwise disjoint index sets, kept in
/// sorted order so that equal sets compare and print equally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Round(Vec<RowOp>);

impl Round {
    pub fn new(mut ops: Vec<RowOp>) -> Result<Self, Gf2Error> {
        ops.sort();
        let r = Round(ops);
        if !r.is_disjoint() {
            return Err(Gf2Error::OverlappingRound);
        }
        Ok(r)
    }

    pub fn single(op: RowOp) -> Self {
        Round(vec![op])
    }

    pub fn ops(&self) -> &[RowOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn touched(&self) -> Vec<usize> {
        self.0.iter().flat_map(RowOp::indices).collect()
    }

    pub fn is_disjoint(&self) -> bool {
        let mut t = self.touched();
        let n = t.len();
        t.sort_unstable();
        t.dedup();
        t.len() == n
    }

    pub fn apply(&self, m: &mut BitMatrix) -> Result<(), Gf2Error> {
        for op in &self.0 {
            op.apply(m)?;
        }
        Ok(())
    }

    pub fn remap(&self, perm: &PermutationMap) -> Round {
        let mut ops: Vec<RowOp> = self.0.iter().map(|o| o.remap(perm)).collect();
        ops.sort();
        Round(ops)
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, op) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{op}")?;
        }
        f.write_str("}")
    }
}

/// Ordered rounds of parallel row operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct OpSchedule {
    pub rounds: Vec<Round>,
}

impl OpSchedule {
    pub fn new(rounds: Vec<Round>) -> Self {
        Self { rounds }
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = &RowOp> {
        self.rounds.iter().flat_map(|r| r.ops().iter())
    }

    pub fn op_count(&self) -> usize {
        self.rounds.iter().map(Round::len).sum()
    }

    pub fn and_count(&self) -> usize {
        self.ops().filter(|o| o.is_and()).count()
    }

    pub fn validate(&self, rows: usize) -> Result<(), Gf2Error> {
        for r in &self.rounds {
            if !r.is_disjoint() {
                return Err(Gf2Error::OverlappingRound);
            }
            for op in r.ops() {
                op.check(rows)?;
            }
        }
        Ok(())
    }

    pub fn remap(&self, perm: &PermutationMap) -> OpSchedule {
        OpSchedule::new(self.rounds.iter().map(|r| r.remap(perm)).collect())
    }

    /// Rounds in reverse order. Every operation is an involution, so this is
    /// the inverse schedule.
    pub fn reversed(&self) -> OpSchedule {
        OpSchedule::new(self.rounds.iter().rev().cloned().collect())
    }

    pub fn concat(&self, other: &OpSchedule) -> OpSchedule {
        let mut rounds = self.rounds.clone();
        rounds.extend(other.rounds.iter().cloned());
        OpSchedule::new(rounds)
    }
}

impl fmt::Display for OpSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, r) in self.rounds.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Replays `s` on a copy of `m`.
pub fn apply_schedule(m: &BitMatrix, s: &OpSchedule) -> Result<BitMatrix, Gf2Error> {
    s.validate(m.rows())?;
    let mut out = m.clone();
    for r in &s.rounds {
        r.apply(&mut out)?;
    }
    Ok(out)
}

/// Result of one anti-diagonal removal attempt.
#[derive(Debug, Clone)]
pub struct AntiDiagRemoval {
    pub round: Round,
    pub matrix: BitMatrix,
    pub removed: bool,
}

/// Clears anti-diagonal `index` (entries `(k, index − k)` above the main
/// diagonal) of an upper-triangular matrix by adding pivot rows.
///
/// All earlier anti-diagonals must already be zero. Fails without touching
/// the matrix when an entry to clear sits in a column whose diagonal pivot
/// is missing.
pub fn anti_diag_removal(index: usize, u: &BitMatrix) -> AntiDiagRemoval {
    let mut matrix = u.clone();
    match remove_anti_diagonal(&mut matrix, index) {
        Some(round) => AntiDiagRemoval {
            round,
            matrix,
            removed: true,
        },
        None => AntiDiagRemoval {
            round: Round::default(),
            matrix: u.clone(),
            removed: false,
        },
    }
}

fn remove_anti_diagonal(u: &mut BitMatrix, index: usize) -> Option<Round> {
    let cols = u.cols();
    // first row whose entry on this anti-diagonal is inside the matrix
    let mut k = index.saturating_sub(cols - 1);
    let mut ops = Vec::new();
    while 2 * k < index && k < u.rows() {
        let c = index - k;
        if c < cols && u.get(k, c) {
            if c < u.rows() && u.get(c, c) {
                ops.push(RowOp::AddRow { src: c, dst: k });
            } else {
                return None;
            }
        }
        k += 1;
    }
    // sources are rows > index/2, targets rows < index/2: no interference
    for op in &ops {
        if let RowOp::AddRow { src, dst } = *op {
            u.add_row(src, dst);
        }
    }
    ops.sort();
    Some(Round(ops))
}

/// A column transposition performed after `round` rounds of the schedule
/// have been applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ColumnSwap {
    pub round: usize,
    pub a: usize,
    pub b: usize,
}

/// Output of [`up_elim_comp`]: a schedule plus the interleaved column swaps.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct UpperElimination {
    pub schedule: OpSchedule,
    pub swaps: Vec<ColumnSwap>,
}

impl UpperElimination {
    /// Replays rounds and column swaps in their recorded interleaving.
    pub fn replay(&self, m: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        self.schedule.validate(m.rows())?;
        let mut out = m.clone();
        let mut swaps = self.swaps.iter().peekable();
        for (pos, r) in self.schedule.rounds.iter().enumerate() {
            while let Some(sw) = swaps.next_if(|s| s.round == pos) {
                out.swap_cols(sw.a, sw.b);
            }
            r.apply(&mut out)?;
        }
        for sw in swaps {
            out.swap_cols(sw.a, sw.b);
        }
        Ok(out)
    }

    /// Net column permutation: final column `j` started as column `apply(j)`.
    pub fn column_origin(&self, cols: usize) -> PermutationMap {
        let pairs: Vec<(usize, usize)> = self.swaps.iter().map(|s| (s.a, s.b)).collect();
        PermutationMap::from_transpositions(cols, &pairs)
    }
}

fn first_heavy_row(u: &BitMatrix) -> Option<usize> {
    (0..u.rows()).find(|&r| u.row_weight(r) >= 2)
}

/// Reduces a square upper-triangular matrix with left-flushed pivots to the
/// identity, using AND-additions to repair the rank deficit.
///
/// Anti-diagonals are cleared left to right, one round each. Before each
/// AND-addition onto the next empty row `i`, clearing stops at the
/// anti-diagonal through `(t, i)` where `t` is the first row of weight at
/// least two; a column holding a 1 in row `t` is swapped into position `i`
/// and the AND of row `t` with the next row holding a 1 in that column is
/// written into row `i`. Exactly `cols − rank` AND-additions are emitted.
///
/// The input must have pairwise distinct, nonzero columns, as produced by
/// factoring a basis-state matrix.
pub fn up_elim_comp(u: &BitMatrix) -> Result<UpperElimination, Gf2Error> {
    let n = u.cols();
    if u.rows() != n {
        return Err(Gf2Error::NotSquare {
            rows: u.rows(),
            cols: n,
        });
    }
    if !u.is_upper_triangular() {
        return Err(Gf2Error::NotUpperTriangular);
    }
    let mut u = u.clone();
    let mut rounds = Vec::new();
    let mut swaps = Vec::new();
    let mut d = 1;
    let mut t = 0;
    let first_gap = (0..n).find(|&i| !u.get(i, i)).unwrap_or(n);
    if (first_gap..n).any(|i| u.get(i, i)) {
        return Err(Gf2Error::PivotsNotFlushed);
    }

    for i in first_gap..n {
        let mut cleared = true;
        while cleared && d < t + i {
            match remove_anti_diagonal(&mut u, d) {
                Some(r) => {
                    if !r.is_empty() {
                        rounds.push(r);
                    }
                    d += 1;
                }
                None => cleared = false,
            }
            t = first_heavy_row(&u).unwrap_or(n);
        }
        let heavy = first_heavy_row(&u).ok_or(Gf2Error::Invariant(
            "rank-deficient matrix without a row of weight two",
        ))?;
        let j = (i..n)
            .find(|&j| u.get(heavy, j))
            .ok_or(Gf2Error::Invariant("no column to the right meets the heavy row"))?;
        if j != i {
            u.swap_cols(i, j);
            swaps.push(ColumnSwap {
                round: rounds.len(),
                a: i,
                b: j,
            });
        }
        let mut hits = (0..n).filter(|&r| u.get(r, i));
        let (first, second) = (hits.next(), hits.next());
        let partner = match (first, second) {
            (Some(f), Some(s)) if f == heavy => s,
            _ => return Err(Gf2Error::Invariant("repair column lacks a second 1")),
        };
        u.and_add_row(heavy, partner, i);
        rounds.push(Round::single(RowOp::AndAddRow {
            src1: heavy,
            src2: partner,
            dst: i,
        }));
    }

    while d < 2 * n {
        if let Some(r) = remove_anti_diagonal(&mut u, d) {
            if !r.is_empty() {
                rounds.push(r);
            }
        }
        d += 1;
    }
    if !u.is_identity() {
        return Err(Gf2Error::Invariant("elimination did not reach the identity"));
    }
    Ok(UpperElimination {
        schedule: OpSchedule::new(rounds),
        swaps,
    })
}

/// Reduces a unit lower-trapezoidal `rows × cols` matrix to `(I O)ᵀ` with
/// rounds of row additions.
///
/// Round `a` clears the `a`-th anti-diagonal of `Lᵀ`, i.e. every entry
/// `(r, c)` of `L` with `r + c = a` and `r > c`, by adding row `c` into row
/// `r`. Row `c` is already a unit vector when used, so each addition clears
/// exactly one entry and no fill-in occurs.
pub fn lower_elim(l: &BitMatrix) -> Result<OpSchedule, Gf2Error> {
    let (rows, cols) = (l.rows(), l.cols());
    if rows < cols || !l.is_lower_triangular() || (0..cols).any(|i| !l.get(i, i)) {
        return Err(Gf2Error::NotUnitLowerTrapezoidal);
    }
    let mut work = l.clone();
    let mut rounds = Vec::new();
    for a in 1..rows + cols - 1 {
        let mut ops = Vec::new();
        let mut c = a.saturating_sub(rows - 1);
        while 2 * c < a && c < cols {
            let r = a - c;
            if work.get(r, c) {
                ops.push(RowOp::AddRow { src: c, dst: r });
            }
            c += 1;
        }
        if ops.is_empty() {
            continue;
        }
        let round = Round::new(ops)?;
        round.apply(&mut work)?;
        rounds.push(round);
    }
    debug_assert_eq!(work, BitMatrix::identity_block(rows, cols));
    Ok(OpSchedule::new(rounds))
}
