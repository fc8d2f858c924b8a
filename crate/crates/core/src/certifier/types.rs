use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ntheory::IntPolynomial;
use crate::stickelberger::FieldContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    Pps,
    Paps,
}

/// A candidate sequence type. PPS periods are p^a * q^l * n',
/// PAPS periods are q^l * n' + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceType {
    pub family: Family,
    pub p: u64,
    pub a: u32,
    pub q: u64,
    pub l: u64,
    pub nprime: u64,
}

impl SequenceType {
    pub fn pps(p: u64, a: u32, q: u64, l: u64, nprime: u64) -> Self {
        Self {
            family: Family::Pps,
            p,
            a,
            q,
            l,
            nprime,
        }
    }

    pub fn paps(p: u64, q: u64, l: u64, nprime: u64) -> Self {
        Self {
            family: Family::Paps,
            p,
            a: 0,
            q,
            l,
            nprime,
        }
    }
}

impl fmt::Display for SequenceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Pps => write!(
                f,
                "PPS [{}, {}^{} * {}^{} * {}]",
                self.p, self.p, self.a, self.q, self.l, self.nprime
            ),
            Family::Paps => write!(
                f,
                "PAPS [{}, {}^{} * {} + 1]",
                self.p, self.q, self.l, self.nprime
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    Strict,
    PaperAssumptions,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Self::Strict),
            "paper" | "paper_assumptions" | "paper-assumptions" => Ok(Self::PaperAssumptions),
            _ => Err(format!("unknown mode {s:?} (expected strict or paper)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FieldKind {
    ImagQuadratic,
    RealQuadratic,
    QuarticCm,
}

impl FromStr for FieldKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "IMAG_QUADRATIC" => Ok(Self::ImagQuadratic),
            "REAL_QUADRATIC" => Ok(Self::RealQuadratic),
            "QUARTIC_CM" => Ok(Self::QuarticCm),
            _ => Err(format!("unknown field kind {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPolyRecord {
    pub label: String,
    pub p: u64,
    pub field_kind: FieldKind,
    pub polynomial: IntPolynomial,
    pub provenance: String,
}

/// Why a candidate order was discarded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub candidate: u64,
    pub rule: String,
}

/// Classes x_k = c_k * x_1 in a group where x_1 has order `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRelation {
    pub ctx: FieldContext,
    pub modulus: u64,
    pub coeffs: Vec<i64>,
    /// c_1..c_u followed by c_(u+k) = -c_k.
    pub extended: Vec<i64>,
    pub candidates_rejected: Vec<Rejection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub inputs_digest: String,
    pub outcome: Outcome,
    pub evidence: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLine {
    pub modulus: u64,
    pub l: u64,
    pub solvable: bool,
    pub witness: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reason {
    /// p is outside the residue class or range a certifier handles.
    PrimeClass,
    QNotPrime,
    Order,
    Exponent,
    Nprime,
    Divisibility,
    /// A class polynomial has a root modulo q.
    PolynomialRoot,
    DiscriminantGuard,
    Data,
    Hf,
    HMinus,
    Pivot,
    RankDeficient,
    DegenerateModulus,
    LExceedsL0,
    NotInQp,
    InternalContradiction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NonExistent,
    Inconclusive { reason: Reason, detail: String },
}

impl Verdict {
    pub fn is_non_existent(&self) -> bool {
        matches!(self, Verdict::NonExistent)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NonExistent => write!(f, "NON_EXISTENT"),
            Verdict::Inconclusive { reason, detail } => {
                let code = serde_json::to_value(reason).expect("unit variant");
                write!(f, "INCONCLUSIVE({}: {detail})", code.as_str().unwrap_or("?"))
            }
        }
    }
}

/// A ledger entry as carried inside a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub p: u64,
    pub f: u64,
    pub order: u64,
    pub provenance: String,
}

/// Everything outside the input that the certificate depended on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataUsed {
    pub polynomials: Vec<ClassPolyRecord>,
    pub ledger: Option<LedgerEntry>,
}

pub const FORMAT_VERSION: u32 = 1;
pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub format_version: u32,
    pub digest_algorithm: String,
    pub input: SequenceType,
    pub mode: Mode,
    pub w: Option<u64>,
    pub l_max: u64,
    pub steps: Vec<Step>,
    pub relations: Vec<ClassRelation>,
    pub search: Vec<SearchLine>,
    pub l0: Option<u64>,
    pub data: DataUsed,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
