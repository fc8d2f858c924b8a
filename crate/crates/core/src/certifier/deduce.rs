//! Deduce the order of x_1 and the classes x_k = c_k x_1 from the HNF basis.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::types::{ClassRelation, LedgerEntry, Mode, Reason, Rejection};
use crate::lattice::HnfBasis;
use crate::matrix::IntMatrix;
use crate::ntheory::{factor_u64, is_prime_u64};
use crate::stickelberger::FieldContext;

pub const R_PARITY: &str = "R_PARITY";
pub const R_NORM: &str = "R_NORM";
pub const R_ORBIT: &str = "R_ORBIT";
pub const R_PAIR: &str = "R_PAIR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeduceError {
    pub reason: Reason,
    pub detail: String,
}

fn fail<T>(reason: Reason, detail: impl Into<String>) -> Result<T, DeduceError> {
    Err(DeduceError {
        reason,
        detail: detail.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deduction {
    pub d1: u64,
    pub divisors: Vec<u64>,
    pub rejected: Vec<Rejection>,
    pub survivors: Vec<u64>,
    /// One relation per modulus the search must cover.
    pub carried: Vec<ClassRelation>,
    pub from_ledger: bool,
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let base = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(base.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

fn symmetric(x: &BigInt, n: u64) -> i64 {
    let r = x.mod_floor(&BigInt::from(n)).to_i64().expect("residue below n");
    if r > (n / 2) as i64 {
        r - n as i64
    } else {
        r
    }
}

/// Back-substitution through the rows of B: c_1 = 1 and
/// c_k = -d_k^(-1) * sum_{j<k} B[k][j] c_j (mod n).
pub fn coefficients_mod(b: &IntMatrix, n: u64) -> Result<Vec<i64>, DeduceError> {
    let nb = BigInt::from(n);
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for k in 1..b.nrows() {
        let d = b[(k, k)].mod_floor(&nb);
        let ext = d.extended_gcd(&nb);
        if !ext.gcd.is_one() {
            return fail(
                Reason::Pivot,
                format!("pivot d_{} = {} is not invertible mod {n}", k + 1, b[(k, k)]),
            );
        }
        let s: BigInt = (0..k).map(|j| &b[(k, j)] * &c[j]).sum();
        c.push((-s * ext.x).mod_floor(&nb));
    }
    Ok(c.iter().map(|x| symmetric(x, n)).collect())
}

fn extend(coeffs: &[i64]) -> Vec<i64> {
    coeffs.iter().copied().chain(coeffs.iter().map(|c| -c)).collect()
}

/// Indices 1, 3, ..., 2u-1 (one-based) of the extended vector: the orbit of
/// x_1 under the Galois group of the decomposition field over F.
fn orbit(extended: &[i64]) -> Vec<i64> {
    extended.iter().step_by(2).copied().collect()
}

/// Candidate orders are the divisors of d_1; R_PARITY keeps odd ones
/// (h^- odd), R_NORM keeps multiples of h_F, R_ORBIT drops those whose
/// orbit sum vanishes, R_PAIR those with an orbit pair summing to zero.
pub fn deduce_class_relation(
    basis: &HnfBasis,
    ctx: &FieldContext,
    h_f: u64,
    hminus: &BigUint,
    mode: Mode,
    ledger: Option<&LedgerEntry>,
) -> Result<Deduction, DeduceError> {
    if h_f.is_multiple_of(2) || !is_prime_u64(h_f) {
        return fail(Reason::Hf, format!("h(F) = {h_f} is not an odd prime"));
    }
    if hminus.is_even() {
        return fail(Reason::HMinus, format!("h^- = {hminus} is even"));
    }
    let Some(d1) = basis.diag[0].to_u64() else {
        return fail(Reason::Pivot, format!("d_1 = {} exceeds 64 bits", basis.diag[0]));
    };
    // x_k for k >= 2 is pinned down only if d_k acts invertibly on the class group
    let hminus_int = BigInt::from(hminus.clone());
    for (k, d) in basis.diag.iter().enumerate().skip(1) {
        if !d.gcd(&hminus_int).is_one() {
            return fail(
                Reason::Pivot,
                format!("pivot d_{} = {d} shares a factor with h^- = {hminus}", k + 1),
            );
        }
    }

    let divisors = divisors(d1);
    let mut rejected = Vec::new();
    let mut reject = |candidate: u64, rule: &str| {
        rejected.push(Rejection {
            candidate,
            rule: rule.to_string(),
        })
    };
    let mut survivors = Vec::new();
    let mut relations = Vec::new();
    for &n in &divisors {
        if n % 2 == 0 {
            reject(n, R_PARITY);
            continue;
        }
        if n % h_f != 0 {
            reject(n, R_NORM);
            continue;
        }
        let coeffs = coefficients_mod(&basis.b, n)?;
        let extended = extend(&coeffs);
        let orb = orbit(&extended);
        let sum: i128 = orb.iter().map(|&x| x as i128).sum();
        if sum.rem_euclid(n as i128) == 0 {
            reject(n, R_ORBIT);
            continue;
        }
        let pair = (0..orb.len())
            .any(|i| (i + 1..orb.len()).any(|j| (orb[i] as i128 + orb[j] as i128).rem_euclid(n as i128) == 0));
        if pair {
            reject(n, R_PAIR);
            continue;
        }
        survivors.push(n);
        relations.push((coeffs, extended));
    }

    if survivors.is_empty() {
        return fail(
            Reason::InternalContradiction,
            format!("every candidate order dividing d_1 = {d1} was eliminated"),
        );
    }
    if survivors.contains(&1) {
        return fail(Reason::DegenerateModulus, "candidate order 1 survives");
    }

    let mut from_ledger = false;
    let keep: Vec<u64> = match (mode, ledger) {
        (Mode::PaperAssumptions, Some(entry)) => {
            if !survivors.contains(&entry.order) {
                return fail(
                    Reason::InternalContradiction,
                    format!(
                        "ledger order {} for ({}, {}) is not among the surviving candidates {:?}",
                        entry.order, entry.p, entry.f, survivors
                    ),
                );
            }
            from_ledger = true;
            vec![entry.order]
        }
        _ => survivors.clone(),
    };

    let carried = survivors
        .iter()
        .zip(relations)
        .filter(|(n, _)| keep.contains(n))
        .map(|(&modulus, (coeffs, extended))| ClassRelation {
            ctx: *ctx,
            modulus,
            coeffs,
            extended,
            candidates_rejected: rejected.clone(),
        })
        .collect();

    Ok(Deduction {
        d1,
        divisors,
        rejected,
        survivors,
        carried,
        from_ledger,
    })
}

/// True iff every row of `reduced` annihilates the relation's coefficients.
pub fn annihilates(reduced: &IntMatrix, rel: &ClassRelation) -> bool {
    if reduced.ncols() != rel.coeffs.len() || rel.modulus == 0 {
        return false;
    }
    let n = BigInt::from(rel.modulus);
    reduced.rows_iter().all(|row| {
        let dot: BigInt = row
            .iter()
            .zip(&rel.coeffs)
            .map(|(a, &c)| a * BigInt::from(c))
            .sum();
        dot.mod_floor(&n).is_zero()
    })
}
