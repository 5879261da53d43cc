use serde::Serialize;

use super::{BitMatrix, Gf2Error};

/// A bijection on `0..len`. `apply(i)` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PermutationMap {
    map: Vec<usize>,
}

impl PermutationMap {
    pub fn identity(len: usize) -> Self {
        Self {
            map: (0..len).collect(),
        }
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self, Gf2Error> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v >= map.len() || seen[v] {
                return Err(Gf2Error::NotAPermutation);
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    /// Identity on `0..len` with the given transpositions applied left to right
    /// to the image list.
    pub fn from_transpositions(len: usize, swaps: &[(usize, usize)]) -> Self {
        let mut p = Self::identity(len);
        for &(a, b) in swaps {
            p.map.swap(a, b);
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Self { map: inv }
    }

    /// `i ↦ self(other(i))`
    pub fn compose(&self, other: &PermutationMap) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Permutation matrix `P` with `P[i][apply(i)] = 1`, so `(P·M)` has row
    /// `i` equal to row `apply(i)` of `M`.
    pub fn to_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), self.len());
        for (i, &v) in self.map.iter().enumerate() {
            m.set(i, v, true);
        }
        m
    }

    /// Decomposition into transpositions; applying them in order to the
    /// identity image list reproduces `self`.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        let mut cur: Vec<usize> = (0..self.len()).collect();
        let mut pos: Vec<usize> = (0..self.len()).collect();
        let mut out = Vec::new();
        for i in 0..self.len() {
            let want = self.map[i];
            if cur[i] != want {
                let j = pos[want];
                out.push((i, j));
                let ci = cur[i];
                cur.swap(i, j);
                pos[ci] = j;
                pos[want] = i;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(PermutationMap::from_vec(vec![0, 0]).is_err());
        assert!(PermutationMap::from_vec(vec![0, 2]).is_err());
        assert!(PermutationMap::from_vec(vec![1, 0]).is_ok());
    }

    #[test]
    fn inverse_and_compose() {
        let p = PermutationMap::from_vec(vec![2, 0, 3, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(p.inverse().compose(&p).is_identity());
    }

    #[test]
    fn transpositions_round_trip() {
        let p = PermutationMap::from_vec(vec![3, 0, 4, 1, 2]).unwrap();
        let t = p.transpositions();
        assert_eq!(PermutationMap::from_transpositions(5, &t), p);
    }

    #[test]
    fn matrix_permutes_rows() {
        let p = PermutationMap::from_vec(vec![1, 2, 0]).unwrap();
        let m = BitMatrix::from_rows(&["100", "010", "001"]).unwrap();
        let pm = p.to_matrix().mul(&m).unwrap();
        assert_eq!(pm, m.permute_rows(&p));
    }
}
