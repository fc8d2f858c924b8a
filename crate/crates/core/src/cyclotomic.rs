//! Exact arithmetic in Z[zeta_p] and periodic p-ary sequences.
//!
//! Elements are stored on the basis 1, x, ..., x^(p-2) of Z[x]/Phi_p(x);
//! x^(p-1) reduces to -(1 + x + ... + x^(p-2)), so equality is vector equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ntheory::is_prime_u64;

/// Largest search space accepted by [`brute_force_search`].
pub const SEARCH_LIMIT: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("shift {t} outside 1..{n}")]
    BadShift { t: usize, n: usize },
    #[error("search space {p}^{n} exceeds the limit of {SEARCH_LIMIT}")]
    SearchTooLarge { p: u64, n: usize },
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("mixed moduli {0} and {1}")]
    ModulusMismatch(u64, u64),
}

fn check_odd_prime(p: u64) -> Result<(), CycError> {
    if p == 2 || !is_prime_u64(p) {
        return Err(CycError::NotOddPrime(p));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: u64) -> Result<Self, CycError> {
        check_odd_prime(p)?;
        Ok(Self {
            p,
            coeffs: vec![BigInt::zero(); (p - 1) as usize],
        })
    }

    pub fn constant(p: u64, n: impl Into<BigInt>) -> Result<Self, CycError> {
        let mut z = Self::zero(p)?;
        z.coeffs[0] = n.into();
        Ok(z)
    }

    pub fn one(p: u64) -> Result<Self, CycError> {
        Self::constant(p, 1)
    }

    /// zeta^e for any integer exponent.
    pub fn zeta_pow(p: u64, e: i64) -> Result<Self, CycError> {
        let mut full = vec![BigInt::zero(); p as usize];
        full[e.rem_euclid(p as i64) as usize] = BigInt::one();
        Self::from_powers(p, full)
    }

    /// Element `sum_i c_i zeta^i` for coefficients on 1, zeta, ..., zeta^(p-1).
    pub fn from_powers(p: u64, mut full: Vec<BigInt>) -> Result<Self, CycError> {
        check_odd_prime(p)?;
        if full.len() != p as usize {
            return Err(CycError::InvalidSequence(format!(
                "expected {p} power coefficients, got {}",
                full.len()
            )));
        }
        let top = full.pop().expect("p >= 3");
        if !top.is_zero() {
            for c in &mut full {
                *c -= &top;
            }
        }
        Ok(Self { p, coeffs: full })
    }

    /// Element from canonical coefficients on 1, ..., x^(p-2).
    pub fn from_coeffs(p: u64, coeffs: Vec<BigInt>) -> Result<Self, CycError> {
        check_odd_prime(p)?;
        if coeffs.len() != (p - 1) as usize {
            return Err(CycError::InvalidSequence(format!(
                "expected {} coefficients, got {}",
                p - 1,
                coeffs.len()
            )));
        }
        Ok(Self { p, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True iff the element is the rational integer `n`.
    pub fn is_constant(&self, n: &BigInt) -> bool {
        &self.coeffs[0] == n && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Complex conjugation, zeta -> zeta^(-1).
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(p - i) % p] += c;
        }
        Self::from_powers(self.p, full).expect("same modulus")
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(
            self.p, other.p,
            "{}",
            CycError::ModulusMismatch(self.p, other.p)
        );
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.assert_same(rhs);
        CycInt {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.assert_same(rhs);
        CycInt {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.assert_same(rhs);
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % p] += a * b;
                }
            }
        }
        CycInt::from_powers(self.p, full).expect("same modulus")
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// True iff `alpha * conj(alpha)` is the rational integer `n`.
pub fn verify_norm_witness(alpha: &CycInt, n: &BigInt) -> bool {
    (alpha * &alpha.conj()).is_constant(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SequenceKind {
    PAry,
    AlmostPAry,
}

impl SequenceKind {
    pub fn token(self) -> &'static str {
        match self {
            Self::PAry => "P_ARY",
            Self::AlmostPAry => "ALMOST_P_ARY",
        }
    }
}

impl FromStr for SequenceKind {
    type Err = CycError;
    fn from_str(s: &str) -> Result<Self, CycError> {
        match s {
            "P_ARY" | "pary" | "p-ary" => Ok(Self::PAry),
            "ALMOST_P_ARY" | "almost" | "almost-p-ary" => Ok(Self::AlmostPAry),
            _ => Err(CycError::InvalidSequence(format!("unknown kind {s:?}"))),
        }
    }
}

/// One period of a p-ary sequence, as exponents `b_j` of `a_j = zeta^(b_j)`.
/// `None` marks the zero entry of an almost p-ary sequence, always at index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PSequence {
    p: u64,
    kind: SequenceKind,
    exponents: Vec<Option<u64>>,
}

impl PSequence {
    pub fn new(p: u64, kind: SequenceKind, exponents: Vec<Option<u64>>) -> Result<Self, CycError> {
        check_odd_prime(p)?;
        if exponents.is_empty() {
            return Err(CycError::InvalidSequence("empty period".into()));
        }
        for (j, e) in exponents.iter().enumerate() {
            let want_zero = kind == SequenceKind::AlmostPAry && j == 0;
            match e {
                None if !want_zero => {
                    return Err(CycError::InvalidSequence(format!("zero marker at index {j}")))
                }
                Some(_) if want_zero => {
                    return Err(CycError::InvalidSequence(
                        "almost p-ary sequence needs the zero marker at index 0".into(),
                    ))
                }
                Some(b) if *b >= p => {
                    return Err(CycError::InvalidSequence(format!(
                        "exponent {b} at index {j} not reduced mod {p}"
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { p, kind, exponents })
    }

    /// Sequence with every position populated from `exps` (index 0 is
    /// replaced by the zero marker for almost p-ary sequences).
    pub fn from_exponents(p: u64, kind: SequenceKind, exps: &[u64]) -> Result<Self, CycError> {
        let exponents = exps
            .iter()
            .enumerate()
            .map(|(j, &e)| (kind == SequenceKind::PAry || j > 0).then_some(e))
            .collect();
        Self::new(p, kind, exponents)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn period(&self) -> usize {
        self.exponents.len()
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn exponents(&self) -> &[Option<u64>] {
        &self.exponents
    }

    /// Counts of each exponent `b_k - b_(k+t) mod p` over one period.
    fn difference_counts(&self, t: usize) -> Vec<u64> {
        let n = self.exponents.len();
        let p = self.p;
        let mut counts = vec![0u64; p as usize];
        for k in 0..n {
            if let (Some(a), Some(b)) = (self.exponents[k], self.exponents[(k + t) % n]) {
                counts[((a + p - b) % p) as usize] += 1;
            }
        }
        counts
    }

    fn counts_to_cyc(&self, counts: Vec<u64>) -> CycInt {
        CycInt::from_powers(self.p, counts.into_iter().map(BigInt::from).collect())
            .expect("validated modulus")
    }

    /// C(t) = sum_k a_k * conj(a_(k+t)), for 1 <= t <= n-1.
    pub fn autocorrelation(&self, t: usize) -> Result<CycInt, CycError> {
        let n = self.period();
        if t == 0 || t >= n {
            return Err(CycError::BadShift { t, n: n - 1 });
        }
        Ok(self.counts_to_cyc(self.difference_counts(t)))
    }

    /// The shift-0 sum: n for p-ary sequences, n-1 for almost p-ary ones.
    pub fn zero_shift_sum(&self) -> CycInt {
        self.counts_to_cyc(self.difference_counts(0))
    }

    pub fn is_perfect(&self) -> bool {
        (1..self.period()).all(|t| self.autocorrelation(t).expect("valid shift").is_zero())
    }

    /// `sum_k a_k` as an element of Z[zeta_p].
    pub fn element_sum(&self) -> CycInt {
        let mut full = vec![BigInt::zero(); self.p as usize];
        for b in self.exponents.iter().flatten() {
            full[*b as usize] += 1;
        }
        CycInt::from_powers(self.p, full).expect("validated modulus")
    }
}

impl fmt::Display for PSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.p, self.period(), self.kind.token())?;
        for e in &self.exponents {
            match e {
                Some(b) => write!(f, " {b}")?,
                None => write!(f, " Z")?,
            }
        }
        Ok(())
    }
}

impl FromStr for PSequence {
    type Err = CycError;

    fn from_str(s: &str) -> Result<Self, CycError> {
        let bad = |m: &str| CycError::InvalidSequence(m.to_string());
        let mut toks = s.split_whitespace();
        let p: u64 = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing p"))?;
        let n: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing n"))?;
        let kind: SequenceKind = toks.next().ok_or_else(|| bad("missing kind"))?.parse()?;
        let exponents = toks
            .map(|t| match t {
                "Z" => Ok(None),
                _ => t
                    .parse::<u64>()
                    .map(Some)
                    .map_err(|_| bad(&format!("bad exponent {t:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if exponents.len() != n {
            return Err(bad(&format!(
                "declared period {n} but {} exponents",
                exponents.len()
            )));
        }
        Self::new(p, kind, exponents)
    }
}

/// Perfection test on a bare exponent vector: every autocorrelation vanishes
/// exactly when its exponent-difference histogram is constant, because
/// 1 + zeta + ... + zeta^(p-1) = 0 is the only Z-linear relation among powers.
fn exponents_perfect(p: usize, exps: &[usize], almost: bool, counts: &mut [u32]) -> bool {
    let n = exps.len();
    for t in 1..n {
        counts.iter_mut().for_each(|c| *c = 0);
        for k in 0..n {
            let j = (k + t) % n;
            if almost && (k == 0 || j == 0) {
                continue;
            }
            counts[(exps[k] + p - exps[j]) % p] += 1;
        }
        if counts.iter().any(|&c| c != counts[0]) {
            return false;
        }
    }
    true
}

/// Lexicographically first perfect sequence of the given shape, if any.
///
/// The first free coordinate is split across rayon workers; the winner is
/// the lexicographic minimum regardless of scheduling.
pub fn brute_force_search(
    p: u64,
    n: usize,
    kind: SequenceKind,
) -> Result<Option<PSequence>, CycError> {
    check_odd_prime(p)?;
    if n == 0 {
        return Err(CycError::InvalidSequence("empty period".into()));
    }
    let space = (p as u128).checked_pow(n as u32);
    if space.is_none_or(|s| s > SEARCH_LIMIT) {
        return Err(CycError::SearchTooLarge { p, n });
    }
    let almost = kind == SequenceKind::AlmostPAry;
    let pu = p as usize;
    let free: Vec<usize> = if almost { (1..n).collect() } else { (0..n).collect() };
    if free.is_empty() {
        // a single zero entry has no nontrivial shifts
        return PSequence::from_exponents(p, kind, &[0]).map(Some);
    }

    let found = (0..pu).into_par_iter().find_map_first(|lead| {
        let mut exps = vec![0usize; n];
        exps[free[0]] = lead;
        let mut counts = vec![0u32; pu];
        let rest = &free[1..];
        loop {
            if exponents_perfect(pu, &exps, almost, &mut counts) {
                return Some(exps);
            }
            // odometer over the remaining free positions, last one fastest
            let mut i = rest.len();
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                let pos = rest[i];
                exps[pos] += 1;
                if exps[pos] < pu {
                    break;
                }
                exps[pos] = 0;
            }
        }
    });
    match found {
        Some(exps) => {
            let exps: Vec<u64> = exps.into_iter().map(|e| e as u64).collect();
            PSequence::from_exponents(p, kind, &exps).map(Some)
        }
        None => Ok(None),
    }
}
