//! Hermite normal form of integer row lattices.
//!
//! Convention: rows are relations, the basis is lower triangular with
//! positive pivots, and every entry below a pivot is reduced into
//! `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::matrix::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("row lattice has rank below {0}")]
    RankDeficient(usize),
    #[error("input matrix has no columns")]
    NoColumns,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnfBasis {
    pub b: IntMatrix,
    /// Unimodular `U` with `U * R = [B; 0]`.
    pub transform: Option<IntMatrix>,
    pub diag: Vec<BigInt>,
}

impl HnfBasis {
    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    /// `|det B|`, the index of the lattice in Z^u.
    pub fn determinant(&self) -> BigInt {
        self.diag.iter().product()
    }
}

/// Canonical HNF of the row lattice of `r`, with the transform witness.
pub fn hnf(r: &IntMatrix) -> Result<HnfBasis, LatticeError> {
    let m = r.nrows();
    let u = r.ncols();
    if u == 0 {
        return Err(LatticeError::NoColumns);
    }
    let mut w = r.clone();
    let mut t = IntMatrix::identity(m);
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut placed = vec![0usize; u];

    for col in (0..u).rev() {
        let pivot = loop {
            let live: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| !w[(i, col)].is_zero())
                .collect();
            let Some(&piv) = live.iter().min_by(|&&a, &&b| {
                w[(a, col)]
                    .abs()
                    .cmp(&w[(b, col)].abs())
                    .then(a.cmp(&b))
            }) else {
                return Err(LatticeError::RankDeficient(u));
            };
            if live.len() == 1 {
                break piv;
            }
            let d = w[(piv, col)].clone();
            for &i in live.iter().filter(|&&i| i != piv) {
                let q = w[(i, col)].div_floor(&d);
                w.sub_row_multiple(i, piv, &q);
                t.sub_row_multiple(i, piv, &q);
            }
        };
        if w[(pivot, col)].is_negative() {
            w.negate_row(pivot);
            t.negate_row(pivot);
        }
        remaining.retain(|&i| i != pivot);
        placed[col] = pivot;
    }

    let order: Vec<usize> = placed.iter().chain(remaining.iter()).copied().collect();
    let mut b = IntMatrix::zeros(u, u);
    let mut tr = IntMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        if dst < u {
            b.row_mut(dst).clone_from_slice(w.row(src));
        }
        tr.row_mut(dst).clone_from_slice(t.row(src));
    }

    for i in 1..u {
        for j in (0..i).rev() {
            let q = b[(i, j)].div_floor(&b[(j, j)]);
            if !q.is_zero() {
                b.sub_row_multiple(i, j, &q);
                tr.sub_row_multiple(i, j, &q);
            }
        }
    }
    let diag = (0..u).map(|k| b[(k, k)].clone()).collect();
    Ok(HnfBasis {
        b,
        transform: Some(tr),
        diag,
    })
}

/// Solves `x * B = v` over the integers for lower-triangular `B` with
/// nonzero diagonal.
pub fn solve_in_basis(b: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let u = b.nrows();
    let mut x = vec![BigInt::zero(); u];
    for k in (0..u).rev() {
        let mut rest = v[k].clone();
        for (i, xi) in x.iter().enumerate().skip(k + 1) {
            rest -= xi * &b[(i, k)];
        }
        let (q, r) = rest.div_mod_floor(&b[(k, k)]);
        if !r.is_zero() {
            return None;
        }
        x[k] = q;
    }
    Some(x)
}

/// Checks the canonical-form invariants of `basis.b` and that it spans the
/// same lattice as the rows of `r`.
pub fn verify_hnf(r: &IntMatrix, basis: &HnfBasis) -> bool {
    let b = &basis.b;
    let u = b.nrows();
    if b.ncols() != u || r.ncols() != u || basis.diag.len() != u || u == 0 {
        return false;
    }
    for i in 0..u {
        let d = &b[(i, i)];
        if !d.is_positive() || d != &basis.diag[i] {
            return false;
        }
        if (i + 1..u).any(|j| !b[(i, j)].is_zero()) {
            return false;
        }
        if (i + 1..u).any(|k| b[(k, i)].is_negative() || &b[(k, i)] >= d) {
            return false;
        }
    }
    // L(R) inside L(B)
    if (0..r.nrows()).any(|i| solve_in_basis(b, r.row(i)).is_none()) {
        return false;
    }
    // L(B) inside L(R)
    match &basis.transform {
        Some(tr) => {
            if tr.nrows() != r.nrows() || tr.ncols() != r.nrows() {
                return false;
            }
            (0..u).all(|k| combination(tr.row(k), r) == b.row(k))
        }
        None => {
            let Ok(own) = hnf(r) else { return false };
            let tr = own.transform.as_ref().expect("hnf records its transform");
            let reproduced = (0..u).all(|k| combination(tr.row(k), r) == own.b.row(k));
            reproduced && (0..u).all(|k| solve_in_basis(&own.b, b.row(k)).is_some())
        }
    }
}

fn combination(coeffs: &[BigInt], r: &IntMatrix) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); r.ncols()];
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(r.row(i)) {
            *o += c * x;
        }
    }
    out
}
