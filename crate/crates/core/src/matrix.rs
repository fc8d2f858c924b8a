//! Dense integer matrices over arbitrary-precision integers.
//!
//! The text format is shared by the relation-matrix and HNF tooling:
//! a header line `rows cols`, then one row per line with space-separated
//! decimal entries.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix text is empty")]
    Empty,
    #[error("bad header line {0:?}, expected `rows cols`")]
    BadHeader(String),
    #[error("row {row}: expected {expected} entries, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("bad integer {0:?}")]
    BadEntry(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have `cols` entries.
    pub fn from_rows<T: Into<BigInt> + Clone>(
        cols: usize,
        rows: &[Vec<T>],
    ) -> Result<Self, MatrixError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::RowLength {
                    row: i,
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[BigInt]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] -= factor * row[src]`
    pub fn sub_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        debug_assert_ne!(dst, src);
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let delta = s * factor;
            self.data[dst * self.cols + j] -= delta;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for x in self.row_mut(i) {
            *x = -std::mem::take(x);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::Shape(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(bareiss_determinant(self.clone()))
    }

    /// SHA-256 of the canonical text rendering, as lowercase hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_string().as_bytes()))
    }

    /// Entries of a row vector as `i64`, when they all fit.
    pub fn row_i64(&self, i: usize) -> Option<Vec<i64>> {
        self.row(i).iter().map(|x| i64::try_from(x).ok()).collect()
    }
}

fn bareiss_determinant(mut m: IntMatrix) -> BigInt {
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                Some(i) => {
                    m.swap_rows(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                // exact by Sylvester's identity
                m[(i, j)] = v.div_floor(&prev);
            }
            m[(i, k)] = BigInt::zero();
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in self.rows_iter() {
            let line: Vec<String> = r.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(MatrixError::Empty)?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| MatrixError::BadHeader(header.to_string()))?;
        let [rows, cols] = dims[..] else {
            return Err(MatrixError::BadHeader(header.to_string()));
        };
        let mut data = Vec::with_capacity(rows * cols);
        let mut found = 0;
        for (i, line) in lines.enumerate() {
            let entries: Vec<BigInt> = line
                .split_whitespace()
                .map(|t| t.parse::<BigInt>().map_err(|_| MatrixError::BadEntry(t.to_string())))
                .collect::<Result<_, _>>()?;
            if entries.len() != cols {
                return Err(MatrixError::RowLength {
                    row: i,
                    expected: cols,
                    found: entries.len(),
                });
            }
            data.extend(entries);
            found += 1;
        }
        if found != rows {
            return Err(MatrixError::RowCount {
                expected: rows,
                found,
            });
        }
        Ok(Self { rows, cols, data })
    }
}
