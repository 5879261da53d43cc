//! GF(2) matrices, LU factorization with left-flushed pivots, and the
//! anti-diagonal elimination schedulers that turn the factors into rounds
//! of parallel X / CX / CCX row operations.

mod lu;
mod matrix;
mod perm;
mod schedule;

use thiserror::Error;

pub use lu::{lu_decompose, LuFactorization};
pub use matrix::{rank, BitMatrix};
pub use perm::PermutationMap;
pub use schedule::{
    anti_diag_removal, apply_schedule, lower_elim, up_elim_comp, AntiDiagRemoval, ColumnSwap,
    OpSchedule, Round, RowOp, UpperElimination,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("row {row} has a different length from row 0")]
    Ragged { row: usize },
    #[error("invalid bit character {0:?}")]
    BadDigit(char),
    #[error("cannot multiply {left:?} by {right:?}")]
    Shape {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("mapping is not a bijection")]
    NotAPermutation,
    #[error("row index {index} out of bounds for {rows} rows")]
    OutOfBounds { index: usize, rows: usize },
    #[error("operation {0} repeats an index")]
    RepeatedIndex(RowOp),
    #[error("operations in a round share an index")]
    OverlappingRound,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has nonzero entries below the diagonal")]
    NotUpperTriangular,
    #[error("diagonal pivots are not flushed to the left")]
    PivotsNotFlushed,
    #[error("matrix is not unit lower-trapezoidal")]
    NotUnitLowerTrapezoidal,
    #[error("internal consistency failure: {0}")]
    Invariant(&'static str),
}
