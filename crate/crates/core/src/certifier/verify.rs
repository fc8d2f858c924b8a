//! Independent replay of certificates.

use serde_json::Value;

use super::certify::{
    certify, certify_paps, certify_pps_3mod4, certify_pps_5mod8, CertifyOptions, Certifier,
};
use super::data::{AssumptionLedger, PolyStore};
use super::deduce::annihilates;
use super::search::{replay_witness, solvable, solvable_by_residues, DP_MODULUS_LIMIT};
use super::types::*;
use crate::lattice::{hnf, verify_hnf};
use crate::stickelberger::{build_relation_matrix, reduce_by_conjugation, FieldContext};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }
}

pub fn verify_certificate(cert: &Certificate) -> bool {
    verify_certificate_report(cert).ok()
}

/// Parses and verifies; unparseable text is invalid.
pub fn verify_certificate_json(text: &str) -> VerifyReport {
    match Certificate::from_json(text) {
        Ok(cert) => verify_certificate_report(&cert),
        Err(e) => VerifyReport {
            failures: vec![format!("certificate does not parse: {e}")],
        },
    }
}

fn evidence<'a>(cert: &'a Certificate, step: &str) -> Option<&'a Value> {
    cert.steps.iter().find(|s| s.name == step).map(|s| &s.evidence)
}

pub fn verify_certificate_report(cert: &Certificate) -> VerifyReport {
    let mut report = VerifyReport::default();
    if cert.format_version != FORMAT_VERSION || cert.digest_algorithm != DIGEST_ALGORITHM {
        report.fail("unsupported format version or digest algorithm");
        return report;
    }

    check_verdict_shape(cert, &mut report);
    replay_pipeline(cert, &mut report);
    replay_search(cert, &mut report);

    // the recorded data must reproduce the certificate exactly
    let polys = PolyStore::from_records(cert.data.polynomials.clone());
    let mut ledger = AssumptionLedger::default();
    if let Some(entry) = &cert.data.ledger {
        if let Err(e) = ledger.insert(entry.clone()) {
            report.fail(format!("recorded ledger entry is invalid: {e}"));
            return report;
        }
    }
    let opts = CertifyOptions {
        mode: cert.mode,
        l_max: cert.l_max,
        w: cert.w,
        ledger: &ledger,
        polys: &polys,
    };
    let certifier = evidence(cert, "family")
        .and_then(|e| e.get("certifier"))
        .and_then(|c| serde_json::from_value::<Certifier>(c.clone()).ok());
    let fresh = match certifier {
        Some(Certifier::Dispatch) => certify(&cert.input, &opts),
        Some(Certifier::Pps3Mod4) => certify_pps_3mod4(&cert.input, &opts),
        Some(Certifier::Pps5Mod8) => certify_pps_5mod8(
            &cert.input,
            &opts,
            polys.find(cert.input.p, FieldKind::RealQuadratic),
            polys.find(cert.input.p, FieldKind::QuarticCm),
        ),
        Some(Certifier::Paps) => certify_paps(&cert.input, &opts),
        None => {
            report.fail("first step does not name its certifier");
            return report;
        }
    };
    if fresh != *cert {
        let first = fresh
            .steps
            .iter()
            .zip(&cert.steps)
            .find(|(a, b)| a != b)
            .map(|(a, _)| a.name.clone());
        report.fail(match first {
            Some(step) => format!("re-certification differs at step {step}"),
            None if fresh.verdict != cert.verdict => format!(
                "re-certification gives verdict {} instead of {}",
                fresh.verdict, cert.verdict
            ),
            None => "re-certification differs from the recorded certificate".into(),
        });
    }
    report
}

fn check_verdict_shape(cert: &Certificate, report: &mut VerifyReport) {
    let all_pass = cert.steps.iter().all(|s| s.outcome == Outcome::Pass);
    match &cert.verdict {
        Verdict::NonExistent => {
            if !all_pass || cert.steps.is_empty() {
                report.fail("NON_EXISTENT verdict with a failing step");
            }
            if !cert.relations.is_empty() && cert.l0.is_none_or(|l0| cert.input.l > l0) {
                report.fail("NON_EXISTENT verdict with l above the certified l_0");
            }
        }
        Verdict::Inconclusive { .. } => {
            if cert.steps.last().is_none_or(|s| s.outcome != Outcome::Fail) {
                report.fail("INCONCLUSIVE verdict without a failing final step");
            }
        }
    }
}

fn replay_pipeline(cert: &Certificate, report: &mut VerifyReport) {
    let Some(matrix_ev) = evidence(cert, "relation_matrix") else {
        if !cert.relations.is_empty() {
            report.fail("relations recorded without a relation matrix");
        }
        return;
    };
    let Some(f) = evidence(cert, "order").and_then(|e| e.get("f")).and_then(Value::as_u64) else {
        report.fail("order step missing f");
        return;
    };
    let ctx = match FieldContext::new(cert.input.p, f, cert.w) {
        Ok(c) => c,
        Err(e) => {
            report.fail(format!("field context does not rebuild: {e}"));
            return;
        }
    };
    let full = build_relation_matrix(&ctx);
    let reduced = reduce_by_conjugation(&full);
    if matrix_ev.get("matrix_digest").and_then(Value::as_str) != Some(full.rows.digest().as_str())
        || matrix_ev.get("reduced_digest").and_then(Value::as_str)
            != Some(reduced.digest().as_str())
    {
        report.fail("relation matrix digest mismatch");
    }
    if let Some(hnf_ev) = evidence(cert, "hnf") {
        match hnf(&reduced) {
            Ok(basis) => {
                if !verify_hnf(&reduced, &basis) {
                    report.fail("recomputed HNF fails verification");
                }
                if hnf_ev.get("basis_digest").and_then(Value::as_str) != Some(basis.b.digest().as_str()) {
                    report.fail("HNF basis digest mismatch");
                }
            }
            Err(_) if cert.steps.last().is_some_and(|s| s.name == "hnf") => {}
            Err(e) => report.fail(format!("HNF does not rebuild: {e}")),
        }
    }
    for rel in &cert.relations {
        if rel.ctx != ctx {
            report.fail("relation context differs from the certificate input");
        }
        if !annihilates(&reduced, rel) {
            report.fail(format!("relation mod {} is not annihilated", rel.modulus));
        }
    }
}

fn replay_search(cert: &Certificate, report: &mut VerifyReport) {
    for line in &cert.search {
        let Some(rel) = cert.relations.iter().find(|r| r.modulus == line.modulus) else {
            report.fail(format!("search line for unknown modulus {}", line.modulus));
            continue;
        };
        match (&line.witness, line.solvable) {
            (Some(e), true) => {
                if !replay_witness(&rel.coeffs, rel.modulus, line.l, e) {
                    report.fail(format!("witness for l = {} mod {} does not replay", line.l, line.modulus));
                }
            }
            (None, false) => {
                let again = if rel.modulus <= DP_MODULUS_LIMIT {
                    solvable_by_residues(&rel.coeffs, rel.modulus, line.l).ok()
                } else {
                    solvable(&rel.coeffs, rel.modulus, line.l).ok().map(|w| w.is_some())
                };
                if again != Some(false) {
                    report.fail(format!("l = {} mod {} is solvable on re-search", line.l, line.modulus));
                }
            }
            _ => report.fail(format!("search line l = {} has inconsistent witness", line.l)),
        }
    }
    // l_0 from the transcript with prefix semantics
    if !cert.relations.is_empty() && !cert.search.is_empty() {
        let mut combined = Some(u64::MAX);
        for rel in &cert.relations {
            let mut l0 = None;
            for line in cert.search.iter().filter(|s| s.modulus == rel.modulus) {
                if line.solvable {
                    break;
                }
                l0 = Some(line.l);
            }
            combined = match (combined, l0) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
        }
        if combined != cert.l0 {
            report.fail("recorded l_0 disagrees with the search transcript");
        }
    }
}
