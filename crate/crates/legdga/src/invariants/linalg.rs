//! Dense GF(2) matrices over u64 bit rows, sized for generator counts.

use crate::error::{Error, Result};

/// A rows x cols matrix over GF(2); each row is one machine word, so at
/// most 64 columns. The complexes here are spanned by generators, which
/// stay far below that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Result<BitMatrix> {
        if cols > 64 {
            return Err(Error::ResourceBound(format!(
                "GF(2) matrix with {cols} columns exceeds the 64-column word size"
            )));
        }
        Ok(BitMatrix {
            rows,
            cols,
            bits: vec![0; rows],
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row] >> col & 1 == 1
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        self.bits[row] ^= 1 << col;
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&r| r == 0)
    }

    /// Rank by Gaussian elimination on the bit rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<u64> = self.bits.iter().copied().filter(|&r| r != 0).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> col & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    /// `self * other`; `other`'s rows must match `self`'s columns.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut bits = vec![0u64; self.rows];
        for (i, out) in bits.iter_mut().enumerate() {
            for k in 0..self.cols {
                if self.get(i, k) {
                    *out ^= other.bits[k];
                }
            }
        }
        BitMatrix {
            rows: self.rows,
            cols: other.cols,
            bits,
        }
    }
}
