use serde::Serialize;

use super::{BitMatrix, PermutationMap};

/// `P·M·Q = L·U` over GF(2).
///
/// `row_perm` and `col_perm` follow the [`BitMatrix::permute_rows`] /
/// [`BitMatrix::permute_cols`] convention: row `r` of `P·M` is row
/// `row_perm.apply(r)` of `M`, and column `k` of `M·Q` is column
/// `col_perm.apply(k)` of `M`. Pivot columns occupy `0..rank`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LuFactorization {
    pub row_perm: PermutationMap,
    pub col_perm: PermutationMap,
    pub l: BitMatrix,
    pub u: BitMatrix,
    pub rank: usize,
}

impl LuFactorization {
    /// Recomposes `L·U`; equal to `P·M·Q` for the source matrix `M`.
    pub fn product(&self) -> BitMatrix {
        self.l
            .mul(&self.u)
            .expect("factor shapes are compatible by construction")
    }

    /// Applies `P` and `Q` to `m`.
    pub fn permuted(&self, m: &BitMatrix) -> BitMatrix {
        m.permute_rows(&self.row_perm).permute_cols(&self.col_perm)
    }
}

/// LU decomposition with partial pivoting and left-flushed pivots.
///
/// Columns are scanned left to right; each takes as pivot the topmost
/// remaining row holding a 1. Columns that yield no pivot are moved to the
/// right end by `Q`, preserving their relative order. `L` is
/// `rows × cols` unit lower-trapezoidal and `U` is `cols × cols` upper
/// trapezoidal with zero rows from `rank` onwards.
pub fn lu_decompose(m: &BitMatrix) -> LuFactorization {
    let (rows, cols) = (m.rows(), m.cols());
    let mut work = m.clone();
    let mut mult = BitMatrix::zeros(rows, cols);
    let mut order: Vec<usize> = (0..rows).collect();
    let mut pivot_cols = Vec::new();
    let mut free_cols = Vec::new();
    let mut r = 0;

    for c in 0..cols {
        let pivot = if r < rows {
            (r..rows).find(|&i| work.get(i, c))
        } else {
            None
        };
        let Some(p) = pivot else {
            free_cols.push(c);
            continue;
        };
        work.swap_rows(r, p);
        mult.swap_rows(r, p);
        order.swap(r, p);
        for i in r + 1..rows {
            if work.get(i, c) {
                work.add_row(r, i);
                mult.set(i, r, true);
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let rank = r;

    let mut q = pivot_cols;
    q.extend(free_cols);
    let col_perm = PermutationMap::from_vec(q).expect("pivot and free columns partition 0..cols");
    let row_perm = PermutationMap::from_vec(order).expect("row order is a permutation");

    let mut l = BitMatrix::zeros(rows, cols);
    for i in 0..rows {
        for k in 0..rank.min(i) {
            if mult.get(i, k) {
                l.set(i, k, true);
            }
        }
        if i < cols {
            l.set(i, i, true);
        }
    }

    let mut u = BitMatrix::zeros(cols, cols);
    for i in 0..rank {
        for k in 0..cols {
            if work.get(i, col_perm.apply(k)) {
                u.set(i, k, true);
            }
        }
    }

    LuFactorization {
        row_perm,
        col_perm,
        l,
        u,
        rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2linalg::rank;

    fn worked_example() -> BitMatrix {
        BitMatrix::from_rows(&[
            "111000", "001011", "001111", "010101", "000000", "000000",
        ])
        .unwrap()
    }

    #[test]
    fn worked_example_factors() {
        let lu = lu_decompose(&worked_example());
        assert_eq!(lu.rank, 4);
        assert!(lu.col_perm.is_identity());
        assert_eq!(lu.row_perm.as_slice(), &[0, 3, 2, 1, 4, 5]);
        let l = BitMatrix::from_rows(&[
            "100000", "010000", "001000", "001100", "000010", "000001",
        ])
        .unwrap();
        let u = BitMatrix::from_rows(&[
            "111000", "010101", "001111", "000100", "000000", "000000",
        ])
        .unwrap();
        assert_eq!(lu.l, l);
        assert_eq!(lu.u, u);
        // P is an involution here, so P = P† as printed.
        assert_eq!(lu.row_perm.to_matrix(), lu.row_perm.inverse().to_matrix());
        assert_eq!(lu.permuted(&worked_example()), lu.product());
    }

    #[test]
    fn identity_is_its_own_factorization() {
        let lu = lu_decompose(&BitMatrix::identity(5));
        assert!(lu.row_perm.is_identity() && lu.col_perm.is_identity());
        assert!(lu.l.is_identity() && lu.u.is_identity());
        assert_eq!(lu.rank, 5);
    }

    #[test]
    fn free_columns_move_right() {
        // column 1 duplicates column 0 after elimination
        let m = BitMatrix::from_rows(&["110", "001", "000"]).unwrap();
        let lu = lu_decompose(&m);
        assert_eq!(lu.rank, 2);
        assert_eq!(lu.col_perm.as_slice(), &[0, 2, 1]);
        assert!(lu.u.row_is_zero(2));
        assert_eq!(lu.permuted(&m), lu.product());
        assert_eq!(rank(&lu.u), lu.rank);
    }

    #[test]
    fn wide_input_recomposes() {
        let m = BitMatrix::from_rows(&["10110", "01101"]).unwrap();
        let lu = lu_decompose(&m);
        assert_eq!(lu.rank, 2);
        assert_eq!(lu.permuted(&m), lu.product());
    }
}
