//! The integer relation matrix M_{p,f} built from Stickelberger coefficients
//! together with the norm and conjugation relations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::ntheory::{is_prime_u64, multiplicative_order_u64, pow_mod, smallest_primitive_root};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StickError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("f = {f} must be an odd divisor of p - 1 = {pm1} with (p - 1)/f even")]
    BadOrder { f: u64, pm1: u64 },
    #[error("{w} is not a primitive root modulo {p}")]
    NotPrimitiveRoot { w: u64, p: u64 },
}

/// Parameters of the decomposition field: p, the order f of q mod p,
/// g = (p-1)/f, u = g/2, and the primitive root w fixing the column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldContext {
    pub p: u64,
    pub f: u64,
    pub g: u64,
    pub u: u64,
    pub w: u64,
}

impl FieldContext {
    /// `w` defaults to the smallest primitive root modulo `p`.
    pub fn new(p: u64, f: u64, w: Option<u64>) -> Result<Self, StickError> {
        if p == 2 || !is_prime_u64(p) {
            return Err(StickError::NotOddPrime(p));
        }
        let pm1 = p - 1;
        if f == 0 || !pm1.is_multiple_of(f) || f.is_multiple_of(2) || !(pm1 / f).is_multiple_of(2) {
            return Err(StickError::BadOrder { f, pm1 });
        }
        let w = match w {
            Some(w) => {
                if w % p == 0 || multiplicative_order_u64(w % p, p) != Ok(pm1) {
                    return Err(StickError::NotPrimitiveRoot { w, p });
                }
                w % p
            }
            None => smallest_primitive_root(p).expect("p is an odd prime"),
        };
        let g = pm1 / f;
        Ok(Self {
            p,
            f,
            g,
            u: g / 2,
            w,
        })
    }
}

/// k_{c,a} = floor(c a / p).
pub fn k_coeff(c: u64, a: u64, p: u64) -> u64 {
    (c as u128 * a as u128 / p as u128) as u64
}

/// m_{c,s} = sum_{t=0}^{f-1} k_{c, w^(-tg-s+1)} for 1 <= s <= g.
pub fn m_coeff(c: u64, s: u64, ctx: &FieldContext) -> u64 {
    let pm1 = ctx.p - 1;
    (0..ctx.f)
        .map(|t| {
            // -tg - s + 1 taken mod p-1 before exponentiation
            let neg = (t * ctx.g + s - 1) % pm1;
            let e = (pm1 - neg) % pm1;
            k_coeff(c, pow_mod(ctx.w, e, ctx.p), ctx.p)
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowLabel {
    Stick(u64),
    Sum,
    Conj(u64),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Stick(c) => write!(f, "STICK({c})"),
            RowLabel::Sum => write!(f, "SUM"),
            RowLabel::Conj(k) => write!(f, "CONJ({k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StickelbergerMatrix {
    pub ctx: FieldContext,
    pub rows: IntMatrix,
    pub labels: Vec<RowLabel>,
}

/// Rows STICK(1..p-1), SUM, CONJ(1..u) over g columns.
pub fn build_relation_matrix(ctx: &FieldContext) -> StickelbergerMatrix {
    let g = ctx.g as usize;
    let u = ctx.u as usize;
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(ctx.p as usize + u);
    let mut labels = Vec::with_capacity(rows.capacity());
    for c in 1..ctx.p {
        rows.push((1..=ctx.g).map(|s| m_coeff(c, s, ctx)).collect());
        labels.push(RowLabel::Stick(c));
    }
    rows.push(vec![1; g]);
    labels.push(RowLabel::Sum);
    for k in 1..=u {
        let mut r = vec![0; g];
        r[k - 1] = 1;
        r[u + k - 1] = 1;
        rows.push(r);
        labels.push(RowLabel::Conj(k as u64));
    }
    StickelbergerMatrix {
        ctx: *ctx,
        rows: IntMatrix::from_rows(g, &rows).expect("uniform rows"),
        labels,
    }
}

/// Substitutes x_(u+k) = -x_k in the STICK and SUM rows; the CONJ rows
/// vanish and are dropped. The result is p x u.
pub fn reduce_by_conjugation(m: &StickelbergerMatrix) -> IntMatrix {
    let u = m.ctx.u as usize;
    let keep: Vec<usize> = m
        .labels
        .iter()
        .enumerate()
        .filter(|(_, l)| !matches!(l, RowLabel::Conj(_)))
        .map(|(i, _)| i)
        .collect();
    let mut out = IntMatrix::zeros(keep.len(), u);
    for (r, &i) in keep.iter().enumerate() {
        for k in 0..u {
            out[(r, k)] = &m.rows[(i, k)] - &m.rows[(i, u + k)];
        }
    }
    out
}
