//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppscert::certifier::*;
use ppscert::cyclotomic::{brute_force_search, PSequence, SequenceKind};
use ppscert::lattice::{hnf, verify_hnf, HnfBasis};
use ppscert::matrix::IntMatrix;
use ppscert::ntheory::*;
use ppscert::quadforms::class_number;
use ppscert::stickelberger::*;

const CASES: [(u64, u64); 5] = [(31, 5), (127, 9), (127, 21), (139, 23), (151, 15)];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn basis_for(p: u64, f: u64, w: Option<u64>) -> (IntMatrix, HnfBasis) {
    let ctx = FieldContext::new(p, f, w).unwrap();
    let reduced = reduce_by_conjugation(&build_relation_matrix(&ctx));
    let basis = hnf(&reduced).unwrap();
    (reduced, basis)
}

fn golden(rows: &[&[i64]]) -> IntMatrix {
    let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    IntMatrix::from_rows(rows.len(), &v).unwrap()
}

/// Reproduces the printed basis for some w; diagonal and determinant for all.
fn golden_hnf(p: u64, f: u64, printed: &IntMatrix) -> Outcome {
    let mut hits = Vec::new();
    let mut diag0: Option<Vec<BigInt>> = None;
    let roots = primitive_roots(p).unwrap();
    for &w in &roots {
        let (reduced, basis) = basis_for(p, f, Some(w));
        ensure(verify_hnf(&reduced, &basis), format!("w = {w}: HNF fails verification"))?;
        if basis.b.transpose() == *printed {
            hits.push(w);
        }
        let mut d = basis.diag.clone();
        d.sort();
        match &diag0 {
            None => diag0 = Some(d),
            Some(d0) => ensure(*d0 == d, format!("w = {w}: diagonal {d:?} differs"))?,
        }
    }
    let det: BigInt = diag0.clone().unwrap().iter().product();
    let printed_det: BigInt = (0..printed.nrows()).map(|i| printed[(i, i)].clone()).product();
    ensure(det == printed_det, format!("det {det} vs printed {printed_det}"))?;
    ensure(!hits.is_empty(), "no primitive root reproduces the printed matrix")?;
    Ok(format!(
        "printed basis for w in {hits:?}; diagonal {:?} and |det| = {det} for all {} roots",
        diag0.unwrap(),
        roots.len()
    ))
}

fn criterion_1() -> Outcome {
    golden_hnf(31, 5, &golden(&[&[18, 8, 15], &[0, 2, 1], &[0, 0, 1]]))
}

fn criterion_2() -> Outcome {
    golden_hnf(
        151,
        15,
        &golden(&[
            &[3934, 1304, 3470, 3544, 1477],
            &[0, 2, 0, 0, 1],
            &[0, 0, 2, 0, 1],
            &[0, 0, 0, 2, 1],
            &[0, 0, 0, 0, 1],
        ]),
    )
}

fn deduce_for(p: u64, f: u64, mode: Mode, w: Option<u64>) -> Result<Deduction, String> {
    let ctx = FieldContext::new(p, f, w).unwrap();
    let (reduced, basis) = basis_for(p, f, w);
    let h_f = class_number(-(p as i64)).unwrap();
    let hm = relative_class_number_minus(p).unwrap();
    let ledger = AssumptionLedger::shipped();
    let d = deduce_class_relation(&basis, &ctx, h_f, &hm, mode, ledger.get(p, f))
        .map_err(|e| format!("({p},{f}): {:?} {}", e.reason, e.detail))?;
    for rel in &d.carried {
        ensure(annihilates(&reduced, rel), format!("({p},{f}) mod {} not annihilated", rel.modulus))?;
    }
    Ok(d)
}

fn criterion_3() -> Outcome {
    let d31 = deduce_for(31, 5, Mode::PaperAssumptions, None)?;
    let r = &d31.carried[0];
    ensure(r.modulus == 9 && r.extended == [1, -4, -2, -1, 4, 2], format!("(31,5): {r:?}"))?;
    let d151 = deduce_for(151, 15, Mode::PaperAssumptions, None)?;
    let r = &d151.carried[0];
    let expect = [1, -652, 232, 195, 715, -1, 652, -232, -195, -715];
    ensure(r.modulus == 1967 && r.extended == expect, format!("(151,15): {r:?}"))?;
    Ok("(1,-4,-2,-1,4,2) mod 9 and (1,-652,232,195,715,...) mod 1967".into())
}

fn criterion_4() -> Outcome {
    let expected = [(31, 5, 1), (127, 9, 1), (127, 21, 3), (139, 23, 1)];
    let mut report = Vec::new();
    for (p, f, want) in expected {
        let d = deduce_for(p, f, Mode::PaperAssumptions, None)?;
        ensure(d.carried.len() == 1, format!("({p},{f}) carries {} moduli", d.carried.len()))?;
        let rel = &d.carried[0];
        let (_, l0) = max_unsolvable_l(&rel.coeffs, rel.modulus, DEFAULT_L_MAX).map_err(|e| e.to_string())?;
        ensure(l0 == Some(want), format!("({p},{f}) mod {}: l0 = {l0:?}, want {want}", rel.modulus))?;
        report.push(format!("({p},{f})->{want}"));
    }
    let d = deduce_for(151, 15, Mode::PaperAssumptions, None)?;
    let rel = &d.carried[0];
    let (lines, l0) = max_unsolvable_l(&rel.coeffs, 1967, 7).map_err(|e| e.to_string())?;
    ensure(matches!(l0, Some(3) | Some(5)), format!("(151,15): l0 = {l0:?}"))?;
    let first_yes = lines.iter().find(|l| l.solvable).unwrap();
    println!(
        "  (151,15) mod 1967: l0 = {}, first solvable l = {} with e = {:?}",
        l0.unwrap(),
        first_yes.l,
        first_yes.witness.as_ref().unwrap()
    );
    report.push(format!("(151,15)->{}", l0.unwrap()));
    Ok(report.join(", "))
}

fn criterion_5() -> Outcome {
    let d = deduce_for(31, 5, Mode::Strict, None)?;
    let odd: Vec<(u64, &str)> = d
        .rejected
        .iter()
        .filter(|r| r.candidate % 2 == 1)
        .map(|r| (r.candidate, r.rule.as_str()))
        .collect();
    ensure(odd == [(1, R_NORM), (3, R_ORBIT)], format!("eliminations {odd:?}"))?;
    ensure(d.survivors == [9], format!("survivors {:?}", d.survivors))?;
    let (_, l0) = max_unsolvable_l(&d.carried[0].coeffs, 9, DEFAULT_L_MAX).unwrap();
    ensure(l0 == Some(1), format!("l0 = {l0:?}"))?;
    let ledger = AssumptionLedger::default();
    let polys = PolyStore::shipped();
    let opts = CertifyOptions::new(Mode::Strict, &ledger, &polys);
    let cert = certify(&SequenceType::pps(31, 1, 2, 1, 1), &opts);
    ensure(cert.verdict.is_non_existent(), format!("verdict {}", cert.verdict))?;
    ensure(cert.data.ledger.is_none(), "certificate used a ledger entry")?;
    Ok("1 by R_NORM, 3 by R_ORBIT, N = 9, l0 = 1, no ledger".into())
}

fn criterion_6() -> Outcome {
    let polys = PolyStore::shipped();
    let mut out = Vec::new();
    for (p, h) in [(31, 3), (127, 5), (139, 3), (151, 7)] {
        let got = class_number(-(p as i64)).unwrap();
        let deg = polys
            .find(p, FieldKind::ImagQuadratic)
            .and_then(|r| r.polynomial.degree())
            .unwrap() as u64;
        ensure(got == h && deg == h, format!("p = {p}: h = {got}, deg = {deg}"))?;
        out.push(format!("h(-{p}) = {h}"));
    }
    Ok(out.join(", "))
}

fn criterion_7() -> Outcome {
    for (p, h) in [(3u64, 1u32), (23, 3), (31, 9)] {
        let got = relative_class_number_minus(p).unwrap();
        ensure(got == BigUint::from(h), format!("h^-({p}) = {got}"))?;
    }
    let mut odd = Vec::new();
    for p in [31, 127, 139, 151] {
        let h = relative_class_number_minus(p).unwrap();
        ensure(h.is_odd(), format!("h^-({p}) = {h} is even"))?;
        odd.push(format!("h^-({p}) = {h}"));
    }
    Ok(odd.join(", "))
}

fn criterion_8() -> Outcome {
    let bound = density_bound(101, 1, 5).map_err(|e| e.to_string())?;
    ensure(bound == Ratio::new(BigInt::from(4), BigInt::from(25)), format!("density {bound}"))?;
    let polys = PolyStore::shipped();
    let ep = polys.find(101, FieldKind::QuarticCm).unwrap();
    let q = 2542000616863u64;
    let disc = ep.polynomial.discriminant().unwrap();
    ensure((&disc % BigInt::from(q)).is_zero(), "q does not divide disc")?;
    let fp = ClassPolyRecord {
        label: "Xi_F101".into(),
        p: 101,
        field_kind: FieldKind::RealQuadratic,
        polynomial: "0 1".parse().unwrap(),
        provenance: "class number one".into(),
    };
    let t = qp_test(101, q, Some(&fp), Some(ep));
    ensure(
        matches!(t.verdict, Verdict::Inconclusive { reason: Reason::DiscriminantGuard, .. }),
        format!("qp-test verdict {}", t.verdict),
    )?;
    Ok(format!("4/25, disc divisible by {q}, qp-test {}", t.verdict))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let primes: Vec<u64> = (3..=151).filter(|&n| is_prime_u64(n)).collect();
    for _ in 0..100 {
        let p = primes[rng.gen_range(0..primes.len())];
        let c = rng.gen_range(1..p);
        let want = (c - 1) * (p - 1) / 2;
        let k_sum: u64 = (1..p).map(|a| c * a / p).sum();
        ensure(k_sum == want, format!("k-sum p={p} c={c}"))?;
        let fs: Vec<u64> = (1..p).filter(|f| (p - 1).is_multiple_of(*f) && f % 2 == 1 && ((p - 1) / f).is_multiple_of(2)).collect();
        let f = fs[rng.gen_range(0..fs.len())];
        let ctx = FieldContext::new(p, f, None).unwrap();
        let m_sum: u64 = (1..=ctx.g).map(|s| m_coeff(c, s, &ctx)).sum();
        ensure(m_sum == want, format!("m-sum p={p} f={f} c={c}: {m_sum} vs {want}"))?;
        let ks: u64 = (1..p).map(|a| k_coeff(c, a, p)).sum();
        ensure(ks == want, format!("k_coeff sum p={p} c={c}"))?;
    }
    Ok("100 random (p, c) pairs".into())
}

fn criterion_10() -> Outcome {
    let mut found = Vec::new();
    for p in [3u64, 5, 7] {
        let s = brute_force_search(p, p as usize, SequenceKind::PAry)
            .map_err(|e| e.to_string())?
            .ok_or(format!("no perfect sequence of period {p}"))?;
        ensure(s.is_perfect(), format!("search result {s} is not perfect"))?;
        let quad: Vec<u64> = (0..p).map(|k| k * k % p).collect();
        let q = PSequence::from_exponents(p, SequenceKind::PAry, &quad).unwrap();
        ensure(q.is_perfect(), format!("quadratic sequence mod {p} is not perfect"))?;
        found.push(s.to_string());
    }
    for n in [4usize, 5, 7, 8] {
        let r = brute_force_search(3, n, SequenceKind::PAry).map_err(|e| e.to_string())?;
        ensure(r.is_none(), format!("(3, {n}) found {r:?}"))?;
    }
    Ok(format!("{}; none for n = 4, 5, 7, 8", found.join("; ")))
}

/// Smallest prime q with ord_p(q) = f such that Xi_p has no root mod q.
fn qualifying_q(p: u64, f: u64, poly: &IntPolynomial) -> u64 {
    (2u64..)
        .filter(|&q| q != p && is_prime_u64(q))
        .find(|&q| {
            multiplicative_order_u64(q, p) == Ok(f)
                && !(poly.discriminant().unwrap() % BigInt::from(q)).is_zero()
                && !poly_has_root_mod(poly, &BigUint::from(q)).unwrap()
        })
        .unwrap()
}

fn suite_certificates() -> Vec<Certificate> {
    let ledger = AssumptionLedger::shipped();
    let polys = PolyStore::shipped();
    let mut certs = Vec::new();
    for mode in [Mode::Strict, Mode::PaperAssumptions] {
        let opts = CertifyOptions::new(mode, &ledger, &polys);
        for (p, f) in CASES {
            let poly = &polys.find(p, FieldKind::ImagQuadratic).unwrap().polynomial;
            let q = qualifying_q(p, f, poly);
            certs.push(certify(&SequenceType::pps(p, 1, q, 1, 1), &opts));
            certs.push(certify(&SequenceType::pps(p, 2, q, 3, 1), &opts));
        }
        certs.push(certify(&SequenceType::pps(31, 1, 2, 1, 3), &opts));
        certs.push(certify(&SequenceType::pps(31, 1, 2, 1, 5), &opts));
        certs.push(certify_paps(&SequenceType::paps(31, 2, 1, 543), &opts));
        certs.push(certify_paps(&SequenceType::paps(31, 2, 1, 1), &opts));
        certs.push(certify(&SequenceType::pps(13, 1, 3, 1, 1), &opts));
    }
    certs
}

fn criterion_11() -> Outcome {
    let certs = suite_certificates();
    let mut with_witness = 0;
    for c in &certs {
        let report = verify_certificate_report(c);
        ensure(report.ok(), format!("{}: {:?}", c.input, report.failures))?;
        let json = c.to_json();
        ensure(Certificate::from_json(&json).ok().as_ref() == Some(c), "JSON round trip")?;

        if let Some(pos) = json.find("\"witness\": [") {
            let start = pos + json[pos..].find(|ch: char| ch.is_ascii_digit()).unwrap();
            let mut bytes = json.clone().into_bytes();
            bytes[start] = if bytes[start] == b'1' { b'3' } else { b'1' };
            let tampered = String::from_utf8(bytes).unwrap();
            ensure(!verify_certificate_json(&tampered).ok(), "tampered witness verifies")?;
            with_witness += 1;
        }
        let pos = json.find("\"status\": \"").unwrap() + 11;
        let mut bytes = json.clone().into_bytes();
        bytes[pos] ^= 0x01;
        let tampered = String::from_utf8(bytes).unwrap();
        ensure(!verify_certificate_json(&tampered).ok(), "tampered verdict byte verifies")?;

        let mut flipped = c.clone();
        flipped.verdict = match &c.verdict {
            Verdict::NonExistent => Verdict::Inconclusive {
                reason: Reason::LExceedsL0,
                detail: String::new(),
            },
            Verdict::Inconclusive { .. } => Verdict::NonExistent,
        };
        ensure(!verify_certificate(&flipped), "flipped verdict verifies")?;
    }
    ensure(with_witness > 0, "no certificate carried a witness")?;
    let n_ok = certs.iter().filter(|c| c.verdict.is_non_existent()).count();
    Ok(format!(
        "{} certificates ({} NON_EXISTENT) verify; {} witness tampers and all verdict tampers rejected",
        certs.len(),
        n_ok,
        with_witness
    ))
}

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        (1, "golden HNF (31,5)", 1, criterion_1),
        (2, "golden HNF (151,15)", 5, criterion_2),
        (3, "coefficient vectors", 1, criterion_3),
        (4, "l0 table", 30, criterion_4),
        (5, "STRICT soundness (31,5)", 1, criterion_5),
        (6, "class numbers", 1, criterion_6),
        (7, "relative class numbers", 5, criterion_7),
        (8, "p = 101 example", 5, criterion_8),
        (9, "Stickelberger identities", 1, criterion_9),
        (10, "sequence oracle", 60, criterion_10),
        (11, "certificate replay", 5, criterion_11),
    ];
    let mut failed = Vec::new();
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => Err(format!(
                "{msg} (took {:.2}s, limit {limit}s)",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {n:>2} {name} [{:.2}s]: {msg}", elapsed.as_secs_f64()),
            Err(msg) => {
                println!("FAIL {n:>2} {name} [{:.2}s]: {msg}", elapsed.as_secs_f64());
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
