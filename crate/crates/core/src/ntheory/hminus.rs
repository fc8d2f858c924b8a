//! Relative class number of Q(zeta_p) from the analytic formula
//! h^- = 2p * prod_{chi odd} (-1/2 * B_{1,chi}), B_{1,chi} = (1/p) sum a*chi(a),
//! evaluated in binary fixed point.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::prime::{pow_mod, smallest_primitive_root};
use super::NtError;

/// Largest prime accepted.
pub const HMINUS_MAX_P: u64 = 200;

const GUARD_BITS: u64 = 64;

/// Fixed-point complex number `(re + i*im) / 2^bits`.
#[derive(Clone, Debug)]
struct FixedComplex {
    re: BigInt,
    im: BigInt,
}

struct FixedContext {
    bits: u64,
}

impl FixedContext {
    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    fn mul_real(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    fn mul(&self, a: &FixedComplex, b: &FixedComplex) -> FixedComplex {
        FixedComplex {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.bits,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.bits,
        }
    }

    /// atan(1/x) by its alternating series.
    fn atan_inv(&self, x: u64) -> BigInt {
        let x2 = BigInt::from(x * x);
        let mut term = self.one() / BigInt::from(x);
        let mut sum = term.clone();
        let mut k = 1u64;
        loop {
            term /= &x2;
            if term.is_zero() {
                break;
            }
            let t = &term / BigInt::from(2 * k + 1);
            if k % 2 == 1 {
                sum -= t;
            } else {
                sum += t;
            }
            k += 1;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
        self.atan_inv(5) * 16 - self.atan_inv(239) * 4
    }

    /// (cos t, sin t) by Taylor series.
    fn cis(&self, theta: &BigInt) -> FixedComplex {
        let mut re = self.one();
        let mut im = BigInt::zero();
        let mut term = self.one();
        let mut k = 1u64;
        loop {
            term = self.mul_real(&term, theta) / BigInt::from(k);
            if term.is_zero() {
                break;
            }
            match k % 4 {
                1 => im += &term,
                2 => re -= &term,
                3 => im -= &term,
                _ => re += &term,
            }
            k += 1;
        }
        FixedComplex { re, im }
    }
}

/// One evaluation at `bits` of working precision; errors when the result is
/// not within 1/4 of an integer or carries a non-negligible imaginary part.
fn hminus_at_precision(p: u64, bits: u64) -> Result<BigInt, NtError> {
    let ctx = FixedContext { bits };
    let n = p - 1;
    let half = n / 2;
    let w = smallest_primitive_root(p)?;

    // roots of unity e^(2 pi i j / n)
    let angle = (ctx.pi() * 2) / BigInt::from(n);
    let step = ctx.cis(&angle);
    let mut roots = Vec::with_capacity(n as usize);
    let mut cur = FixedComplex {
        re: ctx.one(),
        im: BigInt::zero(),
    };
    for _ in 0..n {
        roots.push(cur.clone());
        cur = ctx.mul(&cur, &step);
    }
    // chi_k(w^j) = e^(2 pi i j k / n); odd characters are the odd k
    let residues: Vec<BigInt> = (0..n).map(|j| BigInt::from(pow_mod(w, j, p))).collect();
    let mut product = FixedComplex {
        re: ctx.one(),
        im: BigInt::zero(),
    };
    for k in (1..n).step_by(2) {
        let mut s = FixedComplex {
            re: BigInt::zero(),
            im: BigInt::zero(),
        };
        for (j, r) in residues.iter().enumerate() {
            let z = &roots[((j as u64 * k) % n) as usize];
            s.re += r * &z.re;
            s.im += r * &z.im;
        }
        product = ctx.mul(&product, &s);
    }
    // h = 2p * prod(-S_k / (2p)) with S_k = sum a chi(a) = p * B_{1,chi}
    let two_p = BigInt::from(2 * p);
    let mut numerator = &two_p * &product.re;
    if half % 2 == 1 {
        numerator = -numerator;
    }
    let denominator = two_p.pow(half as u32) << bits;
    let (h, slack) = round_div(&numerator, &denominator);
    let quarter = &denominator >> 2u32;
    let imag = (&two_p * product.im.abs()).abs();
    if slack > quarter || imag > quarter {
        return Err(NtError::Precision { p, bits });
    }
    Ok(h)
}

/// Nearest integer to `num/den` and the absolute remainder.
fn round_div(num: &BigInt, den: &BigInt) -> (BigInt, BigInt) {
    let twice: BigInt = num * 2 + den;
    let q = twice.div_floor(&(den * 2));
    let slack = (num - &q * den).abs();
    (q, slack)
}

/// Working precision for the first pass: max(128, 4p) bits.
pub fn hminus_precision(p: u64) -> u64 {
    (4 * p).max(128)
}

/// Relative class number h^-(Q(zeta_p)) for odd primes p <= 200.
///
/// Evaluated at max(128, 4p) bits (plus guard bits) and again at double
/// that; the two roundings must agree.
pub fn relative_class_number_minus(p: u64) -> Result<BigUint, NtError> {
    if p == 2 || !super::is_prime_u64(p) {
        return Err(NtError::NotOddPrime(p));
    }
    if p > HMINUS_MAX_P {
        return Err(NtError::OutOfEnvelope(p));
    }
    let base = hminus_precision(p);
    let first = hminus_at_precision(p, base + GUARD_BITS)?;
    let second = hminus_at_precision(p, 2 * base + GUARD_BITS)?;
    if first != second || !first.is_positive() {
        return Err(NtError::Precision { p, bits: 2 * base });
    }
    Ok(first.to_biguint().expect("positive"))
}
