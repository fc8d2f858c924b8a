use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NtError;
use crate::matrix::IntMatrix;

/// Below this modulus, root detection evaluates every residue.
pub const DIRECT_EVALUATION_LIMIT: u64 = 1 << 16;

/// Integer polynomial, coefficients stored low degree first with no
/// trailing zeros (the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Resultant as the determinant of the Sylvester matrix.
    pub fn resultant(&self, other: &Self) -> Result<BigInt, NtError> {
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return Err(NtError::ZeroPolynomial);
        };
        let size = m + n;
        if size == 0 {
            return Ok(BigInt::one());
        }
        let mut syl = IntMatrix::zeros(size, size);
        for r in 0..n {
            for (k, c) in self.coeffs.iter().rev().enumerate() {
                syl[(r, r + k)] = c.clone();
            }
        }
        for r in 0..m {
            for (k, c) in other.coeffs.iter().rev().enumerate() {
                syl[(n + r, r + k)] = c.clone();
            }
        }
        Ok(syl.determinant().expect("square"))
    }

    /// `(-1)^(d(d-1)/2) * Res(f, f') / lc(f)`, exact.
    pub fn discriminant(&self) -> Result<BigInt, NtError> {
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(NtError::DegreeTooSmall),
        };
        let res = self.resultant(&self.derivative())?;
        let lc = self.leading_coefficient().expect("nonzero");
        let (quot, rem) = res.div_rem(lc);
        debug_assert!(rem.is_zero(), "lc divides Res(f, f')");
        Ok(if (d * (d - 1) / 2) % 2 == 1 { -quot } else { quot })
    }

    /// Coefficients reduced into `[0, q)`, trailing zeros removed.
    fn reduce_mod(&self, q: &BigUint) -> Vec<BigUint> {
        let qi = BigInt::from(q.clone());
        let mut out: Vec<BigUint> = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&qi).to_biguint().expect("nonnegative"))
            .collect();
        trim(&mut out);
        out
    }

    /// Human-oriented rendering, e.g. `x^3 + x - 1`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit = mag.is_one() && i > 0;
            if !unit {
                out.push_str(&mag.to_string());
            }
            match i {
                0 => {}
                1 => out.push('x'),
                _ => out.push_str(&format!("x^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for IntPolynomial {
    type Err = NtError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = s
            .split_whitespace()
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|_| NtError::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return Err(NtError::Parse("empty polynomial".into()));
        }
        Ok(Self::new(coeffs))
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn trim(v: &mut Vec<BigUint>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// Whether `f(x) = 0 (mod q)` has a solution, for prime `q`.
///
/// Uses direct evaluation below [`DIRECT_EVALUATION_LIMIT`] and
/// `gcd(f, x^q - x)` over F_q above it.
pub fn poly_has_root_mod(f: &IntPolynomial, q: &BigUint) -> Result<bool, NtError> {
    match q.to_u64() {
        Some(small) if small < DIRECT_EVALUATION_LIMIT => has_root_mod_by_evaluation(f, small),
        _ => has_root_mod_by_gcd(f, q),
    }
}

pub fn has_root_mod_by_evaluation(f: &IntPolynomial, q: u64) -> Result<bool, NtError> {
    if q < 2 || q > u32::MAX as u64 {
        return Err(NtError::Parse(format!("evaluation modulus {q} out of range")));
    }
    let red: Vec<u64> = f
        .reduce_mod(&BigUint::from(q))
        .iter()
        .map(|c| c.to_u64().expect("residue fits"))
        .collect();
    if red.is_empty() {
        return Err(NtError::DegenerateReduction(q.to_string()));
    }
    Ok((0..q).any(|x| red.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % q) == 0))
}

pub fn has_root_mod_by_gcd(f: &IntPolynomial, q: &BigUint) -> Result<bool, NtError> {
    let field = PrimeField { q: q.clone() };
    let red = f.reduce_mod(q);
    if red.is_empty() {
        return Err(NtError::DegenerateReduction(q.to_string()));
    }
    if red.len() == 1 {
        return Ok(false);
    }
    if red[0].is_zero() {
        return Ok(true);
    }
    let modulus = field.monic(red);
    // x^q mod f, then gcd(f, x^q - x)
    let x = vec![BigUint::zero(), BigUint::one()];
    let mut xq = field.pow_mod_poly(&x, q, &modulus);
    field.sub_assign(&mut xq, &x);
    let g = field.gcd(modulus, xq);
    Ok(g.len() > 1)
}

struct PrimeField {
    q: BigUint,
}

impl PrimeField {
    fn inv(&self, a: &BigUint) -> BigUint {
        a.modpow(&(&self.q - 2u32), &self.q)
    }

    fn monic(&self, mut a: Vec<BigUint>) -> Vec<BigUint> {
        let lc = a.last().expect("nonzero").clone();
        if !lc.is_one() {
            let inv = self.inv(&lc);
            for c in &mut a {
                *c = (&*c * &inv) % &self.q;
            }
        }
        a
    }

    fn sub_assign(&self, a: &mut Vec<BigUint>, b: &[BigUint]) {
        if a.len() < b.len() {
            a.resize(b.len(), BigUint::zero());
        }
        for (x, y) in a.iter_mut().zip(b) {
            *x = (&*x + &self.q - y) % &self.q;
        }
        trim(a);
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    fn rem_monic(&self, mut a: Vec<BigUint>, m: &[BigUint]) -> Vec<BigUint> {
        let dm = m.len() - 1;
        while a.len() > dm {
            let top = a.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let shift = a.len() - dm;
            for (i, c) in m[..dm].iter().enumerate() {
                let t = (&top * c) % &self.q;
                let slot = &mut a[shift + i];
                *slot = (&*slot + &self.q - t) % &self.q;
            }
        }
        trim(&mut a);
        a
    }

    fn mul_mod_poly(&self, a: &[BigUint], b: &[BigUint], m: &[BigUint]) -> Vec<BigUint> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        for c in &mut out {
            *c %= &self.q;
        }
        self.rem_monic(out, m)
    }

    fn pow_mod_poly(&self, base: &[BigUint], exp: &BigUint, m: &[BigUint]) -> Vec<BigUint> {
        let mut acc = self.rem_monic(vec![BigUint::one()], m);
        let base = self.rem_monic(base.to_vec(), m);
        for i in (0..exp.bits()).rev() {
            acc = self.mul_mod_poly(&acc, &acc, m);
            if exp.bit(i) {
                acc = self.mul_mod_poly(&acc, &base, m);
            }
        }
        acc
    }

    fn gcd(&self, mut a: Vec<BigUint>, mut b: Vec<BigUint>) -> Vec<BigUint> {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let bm = self.monic(b);
            let r = self.rem_monic(a, &bm);
            a = bm;
            b = r;
        }
        a
    }
}
