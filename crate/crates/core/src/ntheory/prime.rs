use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::NtError;

/// Bases that make Miller-Rabin deterministic for every n < 2^64.
const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Rounds used above 2^64; each round has error at most 1/4.
pub const PROBABILISTIC_ROUNDS: usize = 64;

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime(n: u64, d: u64, s: u32, a: u64) -> bool {
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &SMALL_PRIMES {
        if n == sp {
            return true;
        }
        if n.is_multiple_of(sp) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    DETERMINISTIC_BASES
        .iter()
        .all(|&a| strong_probable_prime(n, d, s, a))
}

/// Primality of an arbitrary-precision integer.
///
/// Deterministic below 2^64. Above that, [`PROBABILISTIC_ROUNDS`] rounds with
/// bases drawn from a fixed-seed ChaCha stream, so the answer is reproducible
/// and a composite survives with probability below 2^-128.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &sp in &SMALL_PRIMES {
        if (n % sp).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let span = n - 3u32; // bases in [2, n-2]
    let mut rng = ChaCha20Rng::seed_from_u64(0x005e_ed0f_9a11);
    let nbytes = (n.bits() as usize).div_ceil(8) + 8;
    let mut buf = vec![0u8; nbytes];
    'round: for _ in 0..PROBABILISTIC_ROUNDS {
        rng.fill_bytes(&mut buf);
        let a = BigUint::from_bytes_le(&buf) % &span + 2u32;
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'round;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_bigint(n: &BigInt) -> bool {
    n.to_biguint().is_some_and(|m| is_prime(&m))
}

fn pollard_brent(n: u64, seed: u64) -> Option<u64> {
    let f = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    let c = seed % (n - 1) + 1;
    let (mut y, mut g, mut r, mut q) = (seed % n, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    let m = 64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y, c);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y, c);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys, c);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let mut seed = 2;
    let d = loop {
        if let Some(d) = pollard_brent(n, seed) {
            break d;
        }
        seed += 1;
    };
    split_into(d, out);
    split_into(n / d, out);
}

/// Prime factorization as sorted `(prime, exponent)` pairs. `factor_u64(1)` is empty.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor zero");
    let mut primes = Vec::new();
    for &sp in &SMALL_PRIMES {
        while n.is_multiple_of(sp) {
            primes.push(sp);
            n /= sp;
        }
    }
    split_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

fn reduce_mod(q: &BigInt, p: u64) -> u64 {
    q.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn check_odd_prime(p: u64) -> Result<(), NtError> {
    if p == 2 || !is_prime_u64(p) {
        return Err(NtError::NotOddPrime(p));
    }
    Ok(())
}

/// Order of `q` in (Z/p)^*, found by stripping prime factors from p-1.
pub fn multiplicative_order(q: &BigInt, p: u64) -> Result<u64, NtError> {
    check_odd_prime(p)?;
    let r = reduce_mod(q, p);
    if r == 0 {
        return Err(NtError::NotCoprime {
            value: q.to_string(),
            modulus: p,
        });
    }
    let mut f = p - 1;
    for (prime, _) in factor_u64(p - 1) {
        while f.is_multiple_of(prime) && pow_mod(r, f / prime, p) == 1 {
            f /= prime;
        }
    }
    Ok(f)
}

pub fn multiplicative_order_u64(q: u64, p: u64) -> Result<u64, NtError> {
    multiplicative_order(&BigInt::from(q), p)
}

pub fn smallest_primitive_root(p: u64) -> Result<u64, NtError> {
    check_odd_prime(p)?;
    let factors = factor_u64(p - 1);
    let w = (2..p)
        .find(|&w| factors.iter().all(|&(r, _)| pow_mod(w, (p - 1) / r, p) != 1))
        .expect("a primitive root exists mod an odd prime");
    Ok(w)
}

/// All primitive roots in `[2, p)`, ascending.
pub fn primitive_roots(p: u64) -> Result<Vec<u64>, NtError> {
    check_odd_prime(p)?;
    let factors = factor_u64(p - 1);
    Ok((2..p)
        .filter(|&w| factors.iter().all(|&(r, _)| pow_mod(w, (p - 1) / r, p) != 1))
        .collect())
}

/// Legendre symbol via Euler's criterion.
pub fn legendre_symbol(a: &BigInt, p: u64) -> Result<i8, NtError> {
    check_odd_prime(p)?;
    let r = reduce_mod(a, p);
    Ok(match pow_mod(r, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    })
}

pub fn legendre_symbol_u64(a: u64, p: u64) -> Result<i8, NtError> {
    legendre_symbol(&BigInt::from(a), p)
}

/// Whether `p` is self-conjugate with respect to `m`: writing m = p^a m'
/// with p coprime to m', some power of p is -1 mod m'.
pub fn is_self_conjugate(p: u64, m: u64) -> bool {
    assert!(p >= 2 && m >= 1);
    let mut rest = m;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    if rest <= 2 {
        return true;
    }
    let target = rest - 1;
    let start = p % rest;
    let mut x = start;
    loop {
        if x == target {
            return true;
        }
        x = mul_mod(x, p, rest);
        if x == start {
            return false;
        }
    }
}
