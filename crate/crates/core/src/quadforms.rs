//! Class numbers of imaginary quadratic orders by counting reduced forms.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("discriminant {0} must be negative and congruent to 0 or 1 mod 4")]
    BadDiscriminant(i64),
}

/// The binary quadratic form a x^2 + b xy + c y^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_discriminant(d: i64) -> Result<(), QuadError> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(QuadError::BadDiscriminant(d));
    }
    Ok(())
}

/// Primitive reduced forms of discriminant `d`, sorted by (a, b, c).
///
/// A reduced form has 3a^2 <= |d|, so scanning a up to that bound and
/// b in [-a, a] with matching parity is exhaustive.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>, QuadError> {
    check_discriminant(d)?;
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let form = QuadForm { a, b, c: num / (4 * a) };
            if form.is_reduced() && form.is_primitive() {
                out.push(form);
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

/// Number of primitive reduced forms of discriminant `d`.
pub fn class_number(d: i64) -> Result<u64, QuadError> {
    Ok(reduced_forms(d)?.len() as u64)
}
