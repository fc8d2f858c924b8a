use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppscert::certifier::*;
use ppscert::cyclotomic::{brute_force_search, CycInt, PSequence, SequenceKind};
use ppscert::lattice::{hnf, verify_hnf};
use ppscert::matrix::IntMatrix;
use ppscert::ntheory::*;
use ppscert::quadforms::class_number;
use ppscert::stickelberger::*;

const SMALL_PRIMES: [u64; 4] = [3, 5, 7, 11];

fn cyc(p: u64, c: &[i64]) -> CycInt {
    CycInt::from_powers(p, c.iter().map(|&x| BigInt::from(x)).collect()).unwrap()
}

fn cyc_strategy() -> impl Strategy<Value = (u64, Vec<i64>, Vec<i64>, Vec<i64>)> {
    prop::sample::select(SMALL_PRIMES.to_vec()).prop_flat_map(|p| {
        let v = || prop::collection::vec(-20i64..20, p as usize);
        (Just(p), v(), v(), v())
    })
}

proptest! {
    #[test]
    fn cyc_ring_laws((p, a, b, c) in cyc_strategy()) {
        let (a, b, c) = (cyc(p, &a), cyc(p, &b), cyc(p, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &CycInt::one(p).unwrap(), a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(-&(-&a), a.clone());
    }

    #[test]
    fn conj_is_involutive_homomorphism((p, a, b, _c) in cyc_strategy()) {
        let (a, b) = (cyc(p, &a), cyc(p, &b));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
    }

    #[test]
    fn powers_of_zeta_sum_to_zero(p in prop::sample::select(SMALL_PRIMES.to_vec()), shift in -50i64..50) {
        let mut s = CycInt::zero(p).unwrap();
        for i in 0..p as i64 {
            s = &s + &CycInt::zeta_pow(p, i + shift).unwrap();
        }
        prop_assert!(s.is_zero());
        let z = CycInt::zeta_pow(p, shift).unwrap();
        prop_assert!((&z * &z.conj()).is_constant(&BigInt::one()));
    }

    #[test]
    fn autocorrelation_matches_direct_sum(
        (p, exps) in prop::sample::select(SMALL_PRIMES.to_vec())
            .prop_flat_map(|p| (Just(p), prop::collection::vec(0..p, 2..9))),
        almost in any::<bool>(),
    ) {
        let kind = if almost { SequenceKind::AlmostPAry } else { SequenceKind::PAry };
        let s = PSequence::from_exponents(p, kind, &exps).unwrap();
        let n = exps.len();
        let a: Vec<CycInt> = s
            .exponents()
            .iter()
            .map(|e| match e {
                Some(b) => CycInt::zeta_pow(p, *b as i64).unwrap(),
                None => CycInt::zero(p).unwrap(),
            })
            .collect();
        for t in 1..n {
            let mut direct = CycInt::zero(p).unwrap();
            for k in 0..n {
                direct = &direct + &(&a[k] * &a[(k + t) % n].conj());
            }
            let c = s.autocorrelation(t).unwrap();
            prop_assert_eq!(&c, &direct);
            // C(n - t) is the conjugate of C(t)
            prop_assert_eq!(s.autocorrelation(n - t).unwrap(), c.conj());
        }
        let nonzero = if almost { n - 1 } else { n };
        prop_assert!(s.zero_shift_sum().is_constant(&BigInt::from(nonzero)));
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let v: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    IntMatrix::from_rows(cols, &v).unwrap()
}

/// Random product of elementary row operations.
fn scramble(rng: &mut ChaCha8Rng, m: &IntMatrix) -> IntMatrix {
    let mut m = m.clone();
    let n = m.nrows();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 => m.swap_rows(i, j),
            1 => m.negate_row(i),
            _ if i != j => m.sub_row_multiple(i, j, &BigInt::from(rng.gen_range(-3..=3))),
            _ => {}
        }
    }
    m
}

fn minor(m: &IntMatrix, rows: &[usize]) -> BigInt {
    let v: Vec<Vec<BigInt>> = rows.iter().map(|&r| m.row(r).to_vec()).collect();
    IntMatrix::from_rows(m.ncols(), &v).unwrap().determinant().unwrap()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

#[test]
fn hnf_properties_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    while tested < 200 {
        let cols = rng.gen_range(1..5);
        let rows = rng.gen_range(cols..cols + 3);
        let r = random_matrix(&mut rng, rows, cols, 9);
        let Ok(basis) = hnf(&r) else {
            continue;
        };
        tested += 1;
        assert!(verify_hnf(&r, &basis));

        // determinant is the gcd of the maximal minors
        let g = combinations(rows, cols)
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(&minor(&r, c)));
        assert_eq!(basis.determinant(), g);

        let u = basis.transform.as_ref().unwrap();
        assert_eq!(u.determinant().unwrap().abs(), BigInt::one());
        let ur = u.mul(&r).unwrap();
        for i in 0..rows {
            let want = if i < cols { basis.b.row(i).to_vec() } else { vec![BigInt::zero(); cols] };
            assert_eq!(ur.row(i), &want[..]);
        }

        let again = hnf(&basis.b).unwrap();
        assert_eq!(again.b, basis.b);
        let scrambled = hnf(&scramble(&mut rng, &r)).unwrap();
        assert_eq!(scrambled.b, basis.b);
    }
}

#[test]
fn hnf_detects_tampering() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let r = random_matrix(&mut rng, 4, 3, 9);
        let Ok(mut basis) = hnf(&r) else { continue };
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        basis.b[(i, j)] += 1;
        assert!(!verify_hnf(&r, &basis));
    }
}

fn search_case() -> impl Strategy<Value = (Vec<i64>, u64, u64)> {
    (1usize..6, 2u64..400, prop::sample::select(vec![1u64, 3, 5])).prop_flat_map(|(u, n, l)| {
        (prop::collection::vec(-1000i64..1000, u), Just(n), Just(l))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mitm_matches_plain_and_residues((coeffs, n, l) in search_case()) {
        let fast = solvable(&coeffs, n, l).unwrap();
        let plain = solvable_plain(&coeffs, n, l).unwrap();
        prop_assert_eq!(&fast, &plain);
        prop_assert_eq!(solvable_by_residues(&coeffs, n, l).unwrap(), fast.is_some());
        if let Some(e) = &fast {
            prop_assert!(replay_witness(&coeffs, n, l, e));
        }
    }
}

proptest! {
    #[test]
    fn search_invariances((coeffs, n, l) in search_case(), seed in any::<u64>()) {
        let base = solvable(&coeffs, n, l).unwrap().is_some();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut permuted = coeffs.clone();
        for i in (1..permuted.len()).rev() {
            permuted.swap(i, rng.gen_range(0..=i));
        }
        prop_assert_eq!(solvable(&permuted, n, l).unwrap().is_some(), base);

        let k = rng.gen_range(0..coeffs.len());
        let mut negated = coeffs.clone();
        negated[k] = -negated[k];
        prop_assert_eq!(solvable(&negated, n, l).unwrap().is_some(), base);

        let unit = (1..n as i64).find(|&x| x.gcd(&(n as i64)) == 1 && x > rng.gen_range(0..n as i64)).unwrap_or(1);
        let scaled: Vec<i64> = coeffs.iter().map(|&c| c * unit).collect();
        prop_assert_eq!(solvable(&scaled, n, l).unwrap().is_some(), base);

        let shifted: Vec<i64> = coeffs.iter().map(|&c| c + n as i64).collect();
        prop_assert_eq!(solvable(&shifted, n, l).unwrap().is_some(), base);

        if base {
            prop_assert!(solvable(&coeffs, n, l + 2).unwrap().is_some());
        }
    }

    #[test]
    fn stickelberger_row_sums(idx in 0usize..30, c_seed in any::<u64>()) {
        let primes: Vec<u64> = (3..=151).filter(|&n| is_prime_u64(n)).collect();
        let p = primes[idx % primes.len()];
        let c = 1 + c_seed % (p - 1);
        let want = (c - 1) * (p - 1) / 2;
        prop_assert_eq!((1..p).map(|a| k_coeff(c, a, p)).sum::<u64>(), want);
        for f in (1..p).filter(|f| (p - 1).is_multiple_of(*f) && f % 2 == 1 && ((p - 1) / f).is_multiple_of(2)) {
            let ctx = FieldContext::new(p, f, None).unwrap();
            prop_assert_eq!((1..=ctx.g).map(|s| m_coeff(c, s, &ctx)).sum::<u64>(), want);
        }
    }

    #[test]
    fn trial_division_agrees(n in 2u64..200_000) {
        let trial = (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        prop_assert_eq!(is_prime_u64(n), trial);
        prop_assert_eq!(is_prime(&BigUint::from(n)), trial);
        let prod: u64 = factor_u64(n).iter().map(|&(q, e)| q.pow(e)).product();
        prop_assert_eq!(prod, n);
    }
}

#[test]
fn large_primes() {
    assert!(is_prime_u64(2542000616863));
    assert!(is_prime_u64(18446744073709551557));
    assert!(!is_prime_u64(3215031751));
    let m127: BigUint = (BigUint::one() << 127u32) - 1u32;
    assert!(is_prime(&m127));
    assert!(!is_prime(&(&m127 * 3u32)));
}

/// Maillet determinant: det (r(i * j^-1))_{1 <= i, j <= (p-1)/2} = +-p^((p-3)/2) h^-.
fn hminus_by_maillet(p: u64) -> BigUint {
    let h = (p - 1) / 2;
    let inv = |j: u64| pow_mod_naive(j, p - 2, p);
    let rows: Vec<Vec<i64>> = (1..=h)
        .map(|i| (1..=h).map(|j| (i * inv(j) % p) as i64).collect())
        .collect();
    let det = IntMatrix::from_rows(h as usize, &rows).unwrap().determinant().unwrap();
    let scale = BigInt::from(p).pow((p - 3) as u32 / 2);
    let (q, r) = det.abs().div_rem(&scale);
    assert!(r.is_zero(), "p = {p}: Maillet determinant not divisible");
    q.to_biguint().unwrap()
}

fn pow_mod_naive(b: u64, e: u64, m: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % m)
}

#[test]
fn hminus_matches_maillet_determinant() {
    for p in (3..=151u64).filter(|&p| is_prime_u64(p)) {
        assert_eq!(relative_class_number_minus(p).unwrap(), hminus_by_maillet(p), "p = {p}");
    }
    assert_eq!(relative_class_number_minus(37).unwrap(), BigUint::from(37u32));
    assert_eq!(relative_class_number_minus(71).unwrap(), BigUint::from(3882809u32));
}

#[test]
fn class_numbers_match_brute_count() {
    // count reduced forms without the library's own enumeration bound
    for d in (3..400i64).filter(|d| d % 4 == 3 || d % 4 == 0).map(|d| -d) {
        let mut count = 0;
        for a in 1..=d.abs() {
            for b in -a..=a {
                if (b * b - d) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - d) / (4 * a);
                let reduced = b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c));
                if reduced && a.gcd(&b).gcd(&c) == 1 {
                    count += 1;
                }
            }
        }
        assert_eq!(class_number(d).unwrap(), count, "d = {d}");
    }
}

#[test]
fn deduction_is_independent_of_w() {
    let cases = [(31, 5), (127, 9), (127, 21), (139, 23), (151, 15)];
    for (p, f) in cases {
        let h_f = class_number(-(p as i64)).unwrap();
        let hm = relative_class_number_minus(p).unwrap();
        let mut seen: Option<(Vec<u64>, Vec<Option<u64>>)> = None;
        for w in primitive_roots(p).unwrap() {
            let ctx = FieldContext::new(p, f, Some(w)).unwrap();
            let reduced = reduce_by_conjugation(&build_relation_matrix(&ctx));
            let basis = hnf(&reduced).unwrap();
            let d = deduce_class_relation(&basis, &ctx, h_f, &hm, Mode::Strict, None).unwrap();
            let l0s: Vec<Option<u64>> = d
                .carried
                .iter()
                .map(|r| {
                    assert!(annihilates(&reduced, r));
                    max_unsolvable_l(&r.coeffs, r.modulus, 7).unwrap().1
                })
                .collect();
            let now = (d.survivors.clone(), l0s);
            match &seen {
                None => seen = Some(now),
                Some(s) => assert_eq!(s, &now, "({p},{f}) w = {w}"),
            }
        }
    }
}

#[test]
fn legendre_matches_euler_criterion() {
    for p in [3u64, 31, 127, 151] {
        let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
        for a in 1..p {
            let want = if squares.contains(&a) { 1 } else { -1 };
            assert_eq!(legendre_symbol_u64(a, p).unwrap(), want);
        }
        assert_eq!(legendre_symbol_u64(0, p).unwrap(), 0);
    }
}

fn perfect_by_direct_sum(p: u64, seq: &[Option<u64>]) -> bool {
    let n = seq.len();
    let a: Vec<CycInt> = seq
        .iter()
        .map(|e| e.map_or(CycInt::zero(p).unwrap(), |b| CycInt::zeta_pow(p, b as i64).unwrap()))
        .collect();
    (1..n).all(|t| {
        let mut c = CycInt::zero(p).unwrap();
        for k in 0..n {
            c = &c + &(&a[k] * &a[(k + t) % n].conj());
        }
        c.is_zero()
    })
}

#[test]
fn sequence_search_matches_exhaustive_oracle() {
    for (p, n) in [(3u64, 2usize), (3, 3), (3, 4), (3, 5), (3, 6), (5, 2), (5, 3), (5, 4), (5, 5)] {
        for kind in [SequenceKind::PAry, SequenceKind::AlmostPAry] {
            let mut exists = false;
            let total = p.pow(n as u32);
            for code in 0..total {
                let mut x = code;
                let seq: Vec<Option<u64>> = (0..n)
                    .map(|j| {
                        let d = x % p;
                        x /= p;
                        (kind == SequenceKind::PAry || j > 0).then_some(d)
                    })
                    .collect();
                if kind == SequenceKind::AlmostPAry && code % p != 0 {
                    continue;
                }
                if perfect_by_direct_sum(p, &seq) {
                    exists = true;
                    break;
                }
            }
            let found = brute_force_search(p, n, kind).unwrap();
            assert_eq!(found.is_some(), exists, "p = {p}, n = {n}, {kind:?}");
            if let Some(s) = found {
                assert!(perfect_by_direct_sum(p, s.exponents()));
            }
        }
    }
}
