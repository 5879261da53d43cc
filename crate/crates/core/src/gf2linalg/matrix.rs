use std::fmt;

use serde::{Serialize, Serializer};

use super::Gf2Error;

const WORD: usize = 64;

/// Dense GF(2) matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be nonempty");
        let words = cols.div_ceil(WORD);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// `(I O)ᵀ`: an `rows × cols` matrix with an identity block on top.
    pub fn identity_block(rows: usize, cols: usize) -> Self {
        assert!(rows >= cols);
        let mut m = Self::zeros(rows, cols);
        for i in 0..cols {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of `0`/`1` characters. Whitespace inside a row
    /// is ignored, so `"1 0 1"` and `"101"` are equivalent.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, Gf2Error> {
        if rows.is_empty() {
            return Err(Gf2Error::Empty);
        }
        let parsed: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Gf2Error::BadDigit(other)),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Self::from_bools(&parsed)
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if cols == 0 {
            return Err(Gf2Error::Empty);
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Gf2Error::Ragged { row: bad });
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    pub fn from_columns(rows: usize, columns: &[Vec<bool>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &b) in col.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words + c / WORD];
        let bit = 1u64 << (c % WORD);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn mask_last(&self, w: usize, word: u64) -> u64 {
        let rem = self.cols % WORD;
        if w + 1 == self.words && rem != 0 {
            word & ((1u64 << rem) - 1)
        } else {
            word
        }
    }

    /// `row[dst] ^= row[src]`
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        for w in 0..self.words {
            let v = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= v;
        }
    }

    /// `row[dst] ^= row[a] & row[b]`
    pub fn and_add_row(&mut self, a: usize, b: usize, dst: usize) {
        assert!(a != dst && b != dst && a != b);
        for w in 0..self.words {
            let v = self.data[a * self.words + w] & self.data[b * self.words + w];
            self.data[dst * self.words + w] ^= v;
        }
    }

    /// `row[r] ^= 1…1`
    pub fn flip_row(&mut self, r: usize) {
        for w in 0..self.words {
            let v = self.mask_last(w, !0);
            self.data[r * self.words + w] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let (x, y) = (self.get(r, a), self.get(r, b));
            self.set(r, a, y);
            self.set(r, b, x);
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    pub fn column(&self, c: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<bool>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn column_is_zero(&self, c: usize) -> bool {
        (0..self.rows).all(|r| !self.get(r, c))
    }

    /// True when no column is zero and no two columns coincide.
    pub fn has_distinct_nonzero_columns(&self) -> bool {
        let mut cols = self.columns();
        if cols.iter().any(|c| c.iter().all(|&b| !b)) {
            return false;
        }
        cols.sort();
        cols.windows(2).all(|w| w[0] != w[1])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::Shape {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.words {
                        out.data[r * out.words + w] ^= other.data[k * other.words + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// True if every entry strictly below the main diagonal is zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| !self.get(r, c)))
    }

    /// True if every entry strictly above the main diagonal is zero.
    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| (r + 1..self.cols).all(|c| !self.get(r, c)))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Rows permuted so that row `r` of the result is row `perm.apply(r)` of `self`.
    pub fn permute_rows(&self, perm: &super::PermutationMap) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let src = perm.apply(r);
            out.data[r * self.words..(r + 1) * self.words].copy_from_slice(self.row_words(src));
        }
        out
    }

    /// Columns permuted so that column `c` of the result is column `perm.apply(c)` of `self`.
    pub fn permute_cols(&self, perm: &super::PermutationMap) -> Self {
        assert_eq!(perm.len(), self.cols);
        let mut out = Self::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, perm.apply(c)));
            }
        }
        out
    }

    /// ASCII `0`/`1` grid, one row per line.
    pub fn to_grid(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    fn row_string(&self, r: usize) -> String {
        (0..self.cols)
            .map(|c| if self.get(r, c) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.to_grid())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grid())
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<String> = (0..self.rows).map(|r| self.row_string(r)).collect();
        rows.serialize(s)
    }
}

/// GF(2) rank by forward elimination on a copy.
pub fn rank(m: &BitMatrix) -> usize {
    let mut work = m.clone();
    let mut r = 0;
    for c in 0..work.cols() {
        if r == work.rows() {
            break;
        }
        let Some(p) = (r..work.rows()).find(|&i| work.get(i, c)) else {
            continue;
        };
        work.swap_rows(r, p);
        for i in r + 1..work.rows() {
            if work.get(i, c) {
                work.add_row(r, i);
            }
        }
        r += 1;
    }
    r
}
