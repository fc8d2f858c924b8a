//! The certification pipelines for p = 3 (mod 4) and p = 5 (mod 8).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::data::{AssumptionLedger, PolyStore};
use super::deduce::{annihilates, deduce_class_relation};
use super::search::max_unsolvable_l;
use super::types::*;
use crate::lattice::{hnf, verify_hnf};
use crate::ntheory::{
    factor_u64, is_prime_u64, legendre_symbol_u64, multiplicative_order_u64, pow_mod,
    poly_has_root_mod, relative_class_number_minus, IntPolynomial,
};
use crate::quadforms::class_number;
use crate::stickelberger::{build_relation_matrix, reduce_by_conjugation, FieldContext};

pub const DEFAULT_L_MAX: u64 = 15;
/// Largest p for which the real cyclotomic subfield is known to have class number 1.
pub const MAX_P_3MOD4: u64 = 151;

pub struct CertifyOptions<'a> {
    pub mode: Mode,
    pub l_max: u64,
    pub w: Option<u64>,
    pub ledger: &'a AssumptionLedger,
    pub polys: &'a PolyStore,
}

impl<'a> CertifyOptions<'a> {
    pub fn new(mode: Mode, ledger: &'a AssumptionLedger, polys: &'a PolyStore) -> Self {
        Self {
            mode,
            l_max: DEFAULT_L_MAX,
            w: None,
            ledger,
            polys,
        }
    }
}

pub fn digest_json<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("serializable");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Accumulates steps; the first failing check fixes the verdict.
struct Run {
    cert: Certificate,
}

struct Stop;

impl Run {
    fn new(input: SequenceType, mode: Mode, w: Option<u64>, l_max: u64) -> Self {
        Self {
            cert: Certificate {
                format_version: FORMAT_VERSION,
                digest_algorithm: DIGEST_ALGORITHM.to_string(),
                input,
                mode,
                w,
                l_max,
                steps: Vec::new(),
                relations: Vec::new(),
                search: Vec::new(),
                l0: None,
                data: DataUsed::default(),
                verdict: Verdict::NonExistent,
            },
        }
    }

    fn check(
        &mut self,
        name: &str,
        inputs: Value,
        ok: bool,
        evidence: Value,
        reason: Reason,
        detail: impl FnOnce() -> String,
    ) -> Result<(), Stop> {
        self.cert.steps.push(Step {
            name: name.to_string(),
            inputs_digest: digest_json(&inputs),
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
            evidence,
        });
        if ok {
            Ok(())
        } else {
            self.cert.verdict = Verdict::Inconclusive {
                reason,
                detail: detail(),
            };
            Err(Stop)
        }
    }

    fn finish(self) -> Certificate {
        self.cert
    }
}

/// Names the entry point so that verification can replay through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certifier {
    Dispatch,
    Pps3Mod4,
    Pps5Mod8,
    Paps,
}

impl Certifier {
    fn family(self) -> Option<Family> {
        match self {
            Certifier::Dispatch => None,
            Certifier::Pps3Mod4 | Certifier::Pps5Mod8 => Some(Family::Pps),
            Certifier::Paps => Some(Family::Paps),
        }
    }
}

fn family_check(run: &mut Run, certifier: Certifier) -> Result<(), Stop> {
    let t = run.cert.input;
    let expected = certifier.family();
    let ok = expected.is_none_or(|f| f == t.family);
    run.check(
        "family",
        json!({ "family": t.family }),
        ok,
        json!({ "certifier": certifier }),
        Reason::PrimeClass,
        || format!("{:?} input given to the {:?} certifier", t.family, expected),
    )
}

fn q_check(run: &mut Run) -> Result<(), Stop> {
    let t = run.cert.input;
    let ok = t.q != t.p && is_prime_u64(t.q);
    run.check(
        "q_prime",
        json!({ "p": t.p, "q": t.q }),
        ok,
        json!({ "q_is_prime": is_prime_u64(t.q) }),
        Reason::QNotPrime,
        || format!("q = {} must be a prime different from p = {}", t.q, t.p),
    )
}

/// PPS need a >= 1; PAPS need p | q^l n' - 1.
fn family_shape_check(run: &mut Run) -> Result<(), Stop> {
    let t = run.cert.input;
    match t.family {
        Family::Pps => run.check(
            "exponent_a",
            json!({ "a": t.a }),
            t.a >= 1,
            json!({}),
            Reason::Exponent,
            || "the period must contain p^a with a >= 1".into(),
        ),
        Family::Paps => {
            let qp = pow_mod(t.q % t.p, t.l, t.p) as u128;
            let residue = (qp * (t.nprime % t.p) as u128 % t.p as u128) as u64;
            run.check(
                "divisibility",
                json!({ "p": t.p, "q": t.q, "l": t.l, "nprime": t.nprime }),
                residue == 1,
                json!({ "q^l*nprime mod p": residue }),
                Reason::Divisibility,
                || format!("{} does not divide q^l * n' - 1", t.p),
            )
        }
    }
}

fn nprime_check(run: &mut Run) -> Result<(), Stop> {
    let t = run.cert.input;
    let factors = if t.nprime == 0 { vec![] } else { factor_u64(t.nprime) };
    let symbols: Vec<Value> = factors
        .iter()
        .map(|&(pp, _)| json!({ "prime": pp, "legendre": legendre_symbol_u64(pp, t.p).unwrap_or(0) }))
        .collect();
    let ok = t.nprime >= 1
        && !t.nprime.is_multiple_of(t.q)
        && factors
            .iter()
            .all(|&(pp, _)| legendre_symbol_u64(pp, t.p) == Ok(-1));
    run.check(
        "nprime",
        json!({ "p": t.p, "q": t.q, "nprime": t.nprime }),
        ok,
        json!({ "factors": symbols }),
        Reason::Nprime,
        || {
            format!(
                "n' = {} must be coprime to q with every prime factor a non-residue mod {}",
                t.nprime, t.p
            )
        },
    )
}

fn discriminant_check(run: &mut Run, q: u64, polys: &[&ClassPolyRecord]) -> Result<(), Stop> {
    let mut evidence = Vec::new();
    let mut bad = None;
    for rec in polys {
        let disc = rec.polynomial.discriminant();
        let divides = match &disc {
            Ok(d) => d.mod_floor(&BigInt::from(q)).is_zero(),
            Err(_) => true,
        };
        evidence.push(json!({
            "label": rec.label,
            "discriminant": disc.as_ref().map(ToString::to_string).unwrap_or_default(),
            "q_divides": divides,
        }));
        if divides && bad.is_none() {
            bad = Some(rec.label.clone());
        }
    }
    let labels: Vec<&str> = polys.iter().map(|r| r.label.as_str()).collect();
    run.check(
        "discriminant_guard",
        json!({ "q": q, "polynomials": labels }),
        bad.is_none(),
        Value::Array(evidence),
        Reason::DiscriminantGuard,
        || format!("q = {q} divides the discriminant of {}", bad.clone().unwrap_or_default()),
    )
}

fn root_mod(poly: &IntPolynomial, q: u64) -> Result<bool, String> {
    poly_has_root_mod(poly, &BigUint::from(q)).map_err(|e| e.to_string())
}

/// Certifier entry point: dispatches on the family and on p mod 8.
pub fn certify(t: &SequenceType, opts: &CertifyOptions) -> Certificate {
    if t.p % 4 == 3 {
        certify_3mod4(t, opts, Certifier::Dispatch)
    } else if t.p % 8 == 5 {
        let fp = opts.polys.find(t.p, FieldKind::RealQuadratic);
        let ep = opts.polys.find(t.p, FieldKind::QuarticCm);
        certify_5mod8(t, opts, fp, ep, Certifier::Dispatch)
    } else {
        let mut run = Run::new(*t, opts.mode, opts.w, opts.l_max);
        let _ = family_check(&mut run, Certifier::Dispatch);
        let _ = run.check(
            "prime_class",
            json!({ "p": t.p }),
            false,
            json!({ "p_mod_8": t.p % 8 }),
            Reason::PrimeClass,
            || format!("p = {} is neither 3 mod 4 nor 5 mod 8", t.p),
        );
        run.finish()
    }
}

/// PPS of period p^a q^l n' for p = 3 (mod 4).
pub fn certify_pps_3mod4(t: &SequenceType, opts: &CertifyOptions) -> Certificate {
    certify_3mod4(t, opts, Certifier::Pps3Mod4)
}

/// PAPS of period q^l n' + 1, dispatched on p as for PPS.
pub fn certify_paps(t: &SequenceType, opts: &CertifyOptions) -> Certificate {
    if t.p % 8 == 5 {
        let fp = opts.polys.find(t.p, FieldKind::RealQuadratic);
        let ep = opts.polys.find(t.p, FieldKind::QuarticCm);
        certify_5mod8(t, opts, fp, ep, Certifier::Paps)
    } else {
        certify_3mod4(t, opts, Certifier::Paps)
    }
}

fn certify_3mod4(t: &SequenceType, opts: &CertifyOptions, certifier: Certifier) -> Certificate {
    let mut run = Run::new(*t, opts.mode, opts.w, opts.l_max);
    let _ = pipeline_3mod4(&mut run, opts, certifier);
    run.finish()
}

fn pipeline_3mod4(run: &mut Run, opts: &CertifyOptions, certifier: Certifier) -> Result<(), Stop> {
    let t = run.cert.input;
    family_check(run, certifier)?;
    let p_ok = t.p % 4 == 3 && is_prime_u64(t.p) && t.p <= MAX_P_3MOD4;
    run.check(
        "prime_class",
        json!({ "p": t.p }),
        p_ok,
        json!({ "p_mod_4": t.p % 4, "max_p": MAX_P_3MOD4 }),
        Reason::PrimeClass,
        || format!("p = {} must be a prime = 3 mod 4 with p <= {MAX_P_3MOD4}", t.p),
    )?;
    q_check(run)?;
    let f = multiplicative_order_u64(t.q % t.p, t.p).unwrap_or(0);
    run.check(
        "order",
        json!({ "p": t.p, "q": t.q }),
        f > 1 && f % 2 == 1,
        json!({ "f": f, "g": (t.p - 1).checked_div(f).unwrap_or(0) }),
        Reason::Order,
        || format!("ord_p(q) = {f} must be odd and greater than 1"),
    )?;
    family_shape_check(run)?;
    run.check(
        "l_odd",
        json!({ "l": t.l }),
        t.l % 2 == 1,
        json!({}),
        Reason::Exponent,
        || format!("l = {} must be odd", t.l),
    )?;
    nprime_check(run)?;

    let record = opts.polys.find(t.p, FieldKind::ImagQuadratic);
    let h_f = class_number(-(t.p as i64)).unwrap_or(0);
    let degree = record.and_then(|r| r.polynomial.degree()).unwrap_or(0) as u64;
    run.check(
        "class_polynomial",
        json!({ "p": t.p, "label": record.map(|r| r.label.clone()) }),
        record.is_some() && degree == h_f,
        json!({ "degree": degree, "class_number": h_f }),
        Reason::Data,
        || match record {
            None => format!("no class polynomial for Q(sqrt(-{})) supplied", t.p),
            Some(_) => format!("polynomial degree {degree} differs from h(F) = {h_f}"),
        },
    )?;
    let record = record.expect("checked above").clone();
    run.cert.data.polynomials.push(record.clone());
    run.check(
        "class_number_prime",
        json!({ "d": -(t.p as i64) }),
        h_f % 2 == 1 && is_prime_u64(h_f),
        json!({ "h_F": h_f }),
        Reason::Hf,
        || format!("h(F) = {h_f} is not an odd prime"),
    )?;
    discriminant_check(run, t.q, &[&record])?;
    let root = root_mod(&record.polynomial, t.q);
    run.check(
        "no_root_mod_q",
        json!({ "q": t.q, "polynomial": record.polynomial.to_string() }),
        root == Ok(false),
        json!({ "has_root": root.as_ref().ok(), "error": root.as_ref().err() }),
        Reason::PolynomialRoot,
        || format!("{} has a root modulo {}", record.label, t.q),
    )?;
    let hminus = relative_class_number_minus(t.p);
    let hm_ok = hminus.as_ref().is_ok_and(|h| h.is_odd());
    run.check(
        "relative_class_number",
        json!({ "p": t.p }),
        hm_ok,
        json!({
            "h_minus": hminus.as_ref().map(ToString::to_string).ok(),
            "odd": hm_ok,
        }),
        Reason::HMinus,
        || match &hminus {
            Ok(h) => format!("h^- = {h} is even"),
            Err(e) => e.to_string(),
        },
    )?;
    let hminus = hminus.expect("checked above");

    let ctx = match FieldContext::new(t.p, f, opts.w) {
        Ok(ctx) => ctx,
        Err(e) => {
            return run.check(
                "field_context",
                json!({ "p": t.p, "f": f, "w": opts.w }),
                false,
                json!({}),
                Reason::Order,
                || e.to_string(),
            )
        }
    };
    run.cert.w = Some(ctx.w);
    let full = build_relation_matrix(&ctx);
    let reduced = reduce_by_conjugation(&full);
    run.check(
        "relation_matrix",
        json!({ "p": ctx.p, "f": ctx.f, "w": ctx.w }),
        true,
        json!({
            "rows": full.rows.nrows(),
            "cols": full.rows.ncols(),
            "matrix_digest": full.rows.digest(),
            "reduced_digest": reduced.digest(),
        }),
        Reason::InternalContradiction,
        String::new,
    )?;

    let basis = match hnf(&reduced) {
        Ok(b) => b,
        Err(e) => {
            return run.check(
                "hnf",
                json!({ "reduced_digest": reduced.digest() }),
                false,
                json!({}),
                Reason::RankDeficient,
                || e.to_string(),
            )
        }
    };
    let hnf_ok = verify_hnf(&reduced, &basis);
    let rows: Vec<Vec<String>> = basis
        .b
        .rows_iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();
    run.check(
        "hnf",
        json!({ "reduced_digest": reduced.digest() }),
        hnf_ok,
        json!({
            "basis": rows,
            "diag": basis.diag.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "basis_digest": basis.b.digest(),
        }),
        Reason::InternalContradiction,
        || "HNF failed its own verification".into(),
    )?;

    let entry = match opts.mode {
        Mode::PaperAssumptions => opts.ledger.get(ctx.p, ctx.f).cloned(),
        Mode::Strict => None,
    };
    run.cert.data.ledger = entry.clone();
    let deduction = deduce_class_relation(&basis, &ctx, h_f, &hminus, opts.mode, entry.as_ref());
    let deduce_inputs = json!({
        "basis_digest": basis.b.digest(),
        "h_F": h_f,
        "h_minus": hminus.to_string(),
        "mode": opts.mode,
        "ledger": entry,
    });
    let deduction = match deduction {
        Ok(d) => d,
        Err(e) => {
            return run.check("deduce", deduce_inputs, false, json!({}), e.reason, || e.detail)
        }
    };
    run.cert.relations = deduction.carried.clone();
    run.check(
        "deduce",
        deduce_inputs,
        true,
        json!({
            "d1": deduction.d1,
            "divisors": deduction.divisors,
            "rejected": deduction.rejected,
            "survivors": deduction.survivors,
            "carried": deduction.carried.iter().map(|r| r.modulus).collect::<Vec<_>>(),
            "from_ledger": deduction.from_ledger,
        }),
        Reason::InternalContradiction,
        String::new,
    )?;
    let annihilated = deduction.carried.iter().all(|r| annihilates(&reduced, r));
    run.check(
        "annihilation",
        json!({ "reduced_digest": reduced.digest(), "relations": deduction.carried }),
        annihilated,
        json!({}),
        Reason::InternalContradiction,
        || "a deduced relation is not annihilated by the relation matrix".into(),
    )?;

    let mut l0_all: Option<u64> = Some(u64::MAX);
    let mut per_modulus = Vec::new();
    for rel in &deduction.carried {
        let (lines, l0) = match max_unsolvable_l(&rel.coeffs, rel.modulus, opts.l_max) {
            Ok(x) => x,
            Err(e) => {
                return run.check(
                    "search",
                    json!({ "modulus": rel.modulus, "coeffs": rel.coeffs, "l_max": opts.l_max }),
                    false,
                    json!({}),
                    Reason::LExceedsL0,
                    || e.to_string(),
                )
            }
        };
        run.cert.search.extend(lines);
        per_modulus.push(json!({ "modulus": rel.modulus, "l0": l0 }));
        l0_all = match (l0_all, l0) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
    run.cert.l0 = l0_all;
    run.check(
        "search",
        json!({ "relations": deduction.carried, "l_max": opts.l_max, "l": t.l }),
        l0_all.is_some_and(|l0| t.l <= l0),
        json!({ "per_modulus": per_modulus, "l0": l0_all }),
        Reason::LExceedsL0,
        || match l0_all {
            Some(l0) => format!("l = {} exceeds the certified l_0 = {l0}", t.l),
            None => "the relation is already solvable at l = 1".into(),
        },
    )
}

/// PPS of period p^a q n' for p = 5 (mod 8), decided by the class
/// polynomials of the real quadratic and quartic CM subfields.
pub fn certify_pps_5mod8(
    t: &SequenceType,
    opts: &CertifyOptions,
    fp_poly: Option<&ClassPolyRecord>,
    ep_poly: Option<&ClassPolyRecord>,
) -> Certificate {
    certify_5mod8(t, opts, fp_poly, ep_poly, Certifier::Pps5Mod8)
}

fn certify_5mod8(
    t: &SequenceType,
    opts: &CertifyOptions,
    fp: Option<&ClassPolyRecord>,
    ep: Option<&ClassPolyRecord>,
    certifier: Certifier,
) -> Certificate {
    let mut run = Run::new(*t, opts.mode, opts.w, opts.l_max);
    let _ = pipeline_5mod8(&mut run, fp, ep, certifier);
    run.finish()
}

fn pipeline_5mod8(
    run: &mut Run,
    fp: Option<&ClassPolyRecord>,
    ep: Option<&ClassPolyRecord>,
    certifier: Certifier,
) -> Result<(), Stop> {
    let t = run.cert.input;
    family_check(run, certifier)?;
    let p_ok = t.p % 8 == 5 && t.p > 5 && is_prime_u64(t.p);
    run.check(
        "prime_class",
        json!({ "p": t.p }),
        p_ok,
        json!({ "p_mod_8": t.p % 8 }),
        Reason::PrimeClass,
        || format!("p = {} must be a prime = 5 mod 8 above 5", t.p),
    )?;
    q_check(run)?;
    qp_steps(run, t.p, t.q, fp, ep, |run| {
        family_shape_check(run)?;
        run.check(
            "l_one",
            json!({ "l": t.l }),
            t.l == 1,
            json!({}),
            Reason::Exponent,
            || format!("only l = 1 is covered, got l = {}", t.l),
        )?;
        nprime_check(run)
    })
}

/// Order, discriminant, data and root checks shared by the 5 (mod 8)
/// certifier and `qp_test`. `between` runs after the order check.
fn qp_steps(
    run: &mut Run,
    p: u64,
    q: u64,
    fp: Option<&ClassPolyRecord>,
    ep: Option<&ClassPolyRecord>,
    between: impl FnOnce(&mut Run) -> Result<(), Stop>,
) -> Result<(), Stop> {
    let ord = if p % 4 == 1 && !q.is_multiple_of(p) {
        multiplicative_order_u64(q % p, p).unwrap_or(0)
    } else {
        0
    };
    run.check(
        "order",
        json!({ "p": p, "q": q }),
        ord == (p - 1) / 4,
        json!({ "ord": ord, "required": (p - 1) / 4 }),
        Reason::Order,
        || format!("ord_p(q) = {ord} differs from (p-1)/4"),
    )?;
    between(run)?;
    for rec in [fp, ep].into_iter().flatten() {
        run.cert.data.polynomials.push(rec.clone());
    }
    let present: Vec<&ClassPolyRecord> = [fp, ep].into_iter().flatten().collect();
    discriminant_check(run, q, &present)?;
    run.check(
        "class_polynomials",
        json!({ "p": p, "fp": fp.map(|r| r.label.clone()), "ep": ep.map(|r| r.label.clone()) }),
        fp.is_some() && ep.is_some(),
        json!({}),
        Reason::Data,
        || {
            let missing: Vec<&str> = [(fp, "Xi_F"), (ep, "Xi_E")]
                .iter()
                .filter(|(r, _)| r.is_none())
                .map(|(_, n)| *n)
                .collect();
            format!("missing class polynomial data for p = {p}: {}", missing.join(", "))
        },
    )?;
    let (fp, ep) = (fp.expect("checked"), ep.expect("checked"));
    let fr = root_mod(&fp.polynomial, q);
    let er = root_mod(&ep.polynomial, q);
    run.check(
        "qp_membership",
        json!({ "q": q, "fp": fp.polynomial.to_string(), "ep": ep.polynomial.to_string() }),
        fr == Ok(true) && er == Ok(false),
        json!({ "fp_has_root": fr.as_ref().ok(), "ep_has_root": er.as_ref().ok() }),
        Reason::NotInQp,
        || format!("q = {q} is not shown to lie in Q_{p}"),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QpTest {
    pub p: u64,
    pub q: u64,
    pub steps: Vec<Step>,
    pub in_qp: bool,
    pub verdict: Verdict,
}

/// Decides whether q is certified to lie in Q_p: Xi_F has a root mod q and
/// Xi_E has none. A success is reported as verdict NON_EXISTENT.
pub fn qp_test(p: u64, q: u64, fp: Option<&ClassPolyRecord>, ep: Option<&ClassPolyRecord>) -> QpTest {
    let mut run = Run::new(SequenceType::pps(p, 1, q, 1, 1), Mode::Strict, None, 1);
    let _ = (|| {
        let p_ok = p % 8 == 5 && p > 5 && is_prime_u64(p);
        run.check(
            "prime_class",
            json!({ "p": p }),
            p_ok,
            json!({}),
            Reason::PrimeClass,
            || format!("p = {p} must be a prime = 5 mod 8 above 5"),
        )?;
        q_check(&mut run)?;
        qp_steps(&mut run, p, q, fp, ep, |_| Ok(()))
    })();
    let cert = run.finish();
    QpTest {
        p,
        q,
        in_qp: cert.verdict.is_non_existent(),
        steps: cert.steps,
        verdict: cert.verdict,
    }
}
