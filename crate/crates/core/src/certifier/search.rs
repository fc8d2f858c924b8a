//! Search for e_k in {-l, -l+2, ..., l} with sum e_k c_k = 0 (mod N).
//!
//! Vectors are ordered lexicographically with each coordinate running from
//! -l up to l; every search returns the least witness in that order.

use std::collections::HashMap;

use thiserror::Error;

use super::types::SearchLine;

/// Largest half-space tabulated by the meet-in-the-middle search.
pub const MITM_TABLE_LIMIT: u128 = 1 << 24;
/// Largest total space the searches will walk.
pub const SEARCH_SPACE_LIMIT: u128 = 1 << 48;
/// Largest modulus for the residue-reachability re-search.
pub const DP_MODULUS_LIMIT: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("l = {0} must be odd and positive")]
    EvenL(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("search space ({l}+1)^{u} too large")]
    TooLarge { l: u64, u: usize },
}

fn check(coeffs: &[i64], n: u64, l: u64) -> Result<(), SearchError> {
    if l.is_multiple_of(2) {
        return Err(SearchError::EvenL(l));
    }
    if n == 0 {
        return Err(SearchError::ZeroModulus);
    }
    let space = (l as u128 + 1).checked_pow(coeffs.len() as u32);
    if space.is_none_or(|s| s > SEARCH_SPACE_LIMIT) {
        return Err(SearchError::TooLarge { l, u: coeffs.len() });
    }
    Ok(())
}

/// contrib[k][d] = (-l + 2d) * c_k mod n
fn contributions(coeffs: &[i64], n: u64, l: u64) -> Vec<Vec<u64>> {
    coeffs
        .iter()
        .map(|&c| {
            (0..=l)
                .map(|d| {
                    let e = 2 * d as i128 - l as i128;
                    (e * c as i128).rem_euclid(n as i128) as u64
                })
                .collect()
        })
        .collect()
}

fn digits_to_e(digits: &[u64], l: u64) -> Vec<i64> {
    digits.iter().map(|&d| 2 * d as i64 - l as i64).collect()
}

/// Advances `digits` to the next vector in lex order; false after the last.
fn next_digits(digits: &mut [u64], l: u64) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < l {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

fn residue(contrib: &[Vec<u64>], digits: &[u64], n: u64) -> u64 {
    contrib
        .iter()
        .zip(digits)
        .fold(0u128, |acc, (c, &d)| (acc + c[d as usize] as u128) % n as u128) as u64
}

/// Meet-in-the-middle search returning the lexicographically least witness.
pub fn solvable(coeffs: &[i64], n: u64, l: u64) -> Result<Option<Vec<i64>>, SearchError> {
    check(coeffs, n, l)?;
    let u = coeffs.len();
    let split = u / 2;
    let right_len = u - split;
    if (l as u128 + 1).pow(right_len as u32) > MITM_TABLE_LIMIT {
        return Err(SearchError::TooLarge { l, u });
    }
    let contrib = contributions(coeffs, n, l);
    let (left_c, right_c) = contrib.split_at(split);

    // least right half for each residue
    let mut table: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut right = vec![0u64; right_len];
    loop {
        table
            .entry(residue(right_c, &right, n))
            .or_insert_with(|| right.clone());
        if !next_digits(&mut right, l) {
            break;
        }
    }

    let mut left = vec![0u64; split];
    loop {
        let need = (n - residue(left_c, &left, n)) % n;
        if let Some(r) = table.get(&need) {
            let mut digits = left.clone();
            digits.extend_from_slice(r);
            return Ok(Some(digits_to_e(&digits, l)));
        }
        if !next_digits(&mut left, l) {
            return Ok(None);
        }
    }
}

/// Plain enumeration in lexicographic order.
pub fn solvable_plain(coeffs: &[i64], n: u64, l: u64) -> Result<Option<Vec<i64>>, SearchError> {
    check(coeffs, n, l)?;
    let contrib = contributions(coeffs, n, l);
    let mut digits = vec![0u64; coeffs.len()];
    loop {
        if residue(&contrib, &digits, n) == 0 {
            return Ok(Some(digits_to_e(&digits, l)));
        }
        if !next_digits(&mut digits, l) {
            return Ok(None);
        }
    }
}

/// Existence only, by tracking every reachable partial sum mod n.
pub fn solvable_by_residues(coeffs: &[i64], n: u64, l: u64) -> Result<bool, SearchError> {
    if l.is_multiple_of(2) {
        return Err(SearchError::EvenL(l));
    }
    if n == 0 {
        return Err(SearchError::ZeroModulus);
    }
    if n > DP_MODULUS_LIMIT {
        return Err(SearchError::TooLarge { l, u: coeffs.len() });
    }
    let contrib = contributions(coeffs, n, l);
    let mut reach = vec![false; n as usize];
    reach[0] = true;
    for c in &contrib {
        let mut next = vec![false; n as usize];
        for (r, _) in reach.iter().enumerate().filter(|(_, &on)| on) {
            for &add in c {
                next[((r as u64 + add) % n) as usize] = true;
            }
        }
        reach = next;
    }
    Ok(reach[0])
}

/// True iff `e` is an admissible vector for `l` that sums to 0 mod `n`.
pub fn replay_witness(coeffs: &[i64], n: u64, l: u64, e: &[i64]) -> bool {
    if e.len() != coeffs.len() || n == 0 {
        return false;
    }
    let l = l as i64;
    if e.iter().any(|&x| x.abs() > l || (x - l) % 2 != 0) {
        return false;
    }
    let s: i128 = e.iter().zip(coeffs).map(|(&a, &b)| a as i128 * b as i128).sum();
    s.rem_euclid(n as i128) == 0
}

/// Searches every odd l up to `l_max`; returns the transcript and l_0, the
/// largest odd L with every odd l <= L unsolvable (None when l = 1 solves).
pub fn max_unsolvable_l(
    coeffs: &[i64],
    n: u64,
    l_max: u64,
) -> Result<(Vec<SearchLine>, Option<u64>), SearchError> {
    let mut lines = Vec::new();
    let mut l0 = None;
    let mut prefix = true;
    for l in (1..=l_max).step_by(2) {
        let witness = solvable(coeffs, n, l)?;
        if witness.is_some() {
            prefix = false;
        } else if prefix {
            l0 = Some(l);
        }
        lines.push(SearchLine {
            modulus: n,
            l,
            solvable: witness.is_some(),
            witness,
        });
    }
    Ok((lines, l0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_mod_9() {
        let c = [1, -4, -2];
        assert_eq!(solvable(&c, 9, 1).unwrap(), None);
        let w = solvable(&c, 9, 3).unwrap().unwrap();
        assert_eq!(w, vec![-3, 1, 1]);
        assert!(replay_witness(&c, 9, 3, &w));
        assert!(replay_witness(&c, 9, 3, &[1, 1, 3]));
        assert!(!replay_witness(&c, 9, 3, &[1, 1, 2]));
        assert!(!replay_witness(&c, 9, 1, &[1, 1, 3]));
        assert_eq!(solvable_plain(&c, 9, 3).unwrap(), Some(w));
        assert!(!solvable_by_residues(&c, 9, 1).unwrap());
        assert!(solvable_by_residues(&c, 9, 3).unwrap());
    }

    #[test]
    fn modulus_one_always_solves() {
        assert_eq!(solvable(&[5, 7], 1, 1).unwrap(), Some(vec![-1, -1]));
    }

    #[test]
    fn l0_prefix() {
        let (lines, l0) = max_unsolvable_l(&[1, -4, -2], 9, 7).unwrap();
        assert_eq!(lines.len(), 4);
        assert_eq!(l0, Some(1));
        let (_, l0) = max_unsolvable_l(&[1, -652, 232, 195, 715], 1967, 7).unwrap();
        assert_eq!(l0, Some(3));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(solvable(&[1], 9, 2), Err(SearchError::EvenL(2)));
        assert_eq!(solvable(&[1], 0, 1), Err(SearchError::ZeroModulus));
    }
}
