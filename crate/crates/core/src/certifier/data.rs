//! Shipped class polynomials and the assumption ledger.
//!
//! Both files are line oriented, tab separated, with `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::types::{ClassPolyRecord, FieldKind, LedgerEntry};
use crate::lattice::hnf;
use crate::stickelberger::{build_relation_matrix, reduce_by_conjugation, FieldContext};

pub const CLASS_POLYS_FILE: &str = "class_polys.tsv";
pub const LEDGER_FILE: &str = "ledger.tsv";
/// Overrides the directory both files are read from.
pub const DATA_DIR_ENV: &str = "PPSCERT_DATA_DIR";

const SHIPPED_POLYS: &str = include_str!("../../data/class_polys.tsv");
const SHIPPED_LEDGER: &str = include_str!("../../data/ledger.tsv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ledger entry ({p}, {f}): {message}")]
    Ledger { p: u64, f: u64, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

fn parse_field<T: std::str::FromStr>(line: usize, name: &str, raw: &str) -> Result<T, DataError> {
    raw.parse().map_err(|_| DataError::Parse {
        line,
        message: format!("bad {name} {raw:?}"),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyStore {
    records: Vec<ClassPolyRecord>,
}

impl PolyStore {
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let mut records = Vec::new();
        for (line, f) in data_lines(text) {
            if f.len() < 4 {
                return Err(DataError::Parse {
                    line,
                    message: format!("expected at least 4 fields, found {}", f.len()),
                });
            }
            let polynomial: crate::ntheory::IntPolynomial = parse_field(line, "polynomial", f[3])?;
            if polynomial.degree().unwrap_or(0) < 1 {
                return Err(DataError::Parse {
                    line,
                    message: "polynomial degree must be at least 1".into(),
                });
            }
            let field_kind: FieldKind = f[2].parse().map_err(|m| DataError::Parse { line, message: m })?;
            records.push(ClassPolyRecord {
                label: f[0].to_string(),
                p: parse_field(line, "p", f[1])?,
                field_kind,
                polynomial,
                provenance: f.get(4).copied().unwrap_or("").to_string(),
            });
        }
        Ok(Self { records })
    }

    pub fn shipped() -> Self {
        Self::parse(SHIPPED_POLYS).expect("shipped polynomial data parses")
    }

    /// Reads `class_polys.tsv` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, DataError> {
        Self::parse(&read(&dir.join(CLASS_POLYS_FILE))?)
    }

    /// The directory named by `PPSCERT_DATA_DIR` if set, else the shipped copy.
    pub fn from_env() -> Result<Self, DataError> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::shipped()),
        }
    }

    pub fn from_records(records: Vec<ClassPolyRecord>) -> Self {
        Self { records }
    }

    pub fn records(&self) -> &[ClassPolyRecord] {
        &self.records
    }

    pub fn find(&self, p: u64, kind: FieldKind) -> Option<&ClassPolyRecord> {
        self.records.iter().find(|r| r.p == p && r.field_kind == kind)
    }

    pub fn insert(&mut self, record: ClassPolyRecord) {
        self.records.retain(|r| !(r.p == record.p && r.field_kind == record.field_kind));
        self.records.push(record);
    }
}

fn read(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Odd part of the first HNF pivot of the reduced relation matrix.
pub fn odd_part_of_d1(p: u64, f: u64) -> Result<u64, String> {
    let ctx = FieldContext::new(p, f, None).map_err(|e| e.to_string())?;
    let basis = hnf(&reduce_by_conjugation(&build_relation_matrix(&ctx))).map_err(|e| e.to_string())?;
    let mut d1: BigInt = basis.diag[0].clone();
    while d1.is_even() {
        d1 >>= 1;
    }
    d1.to_u64().ok_or_else(|| format!("d_1 = {} exceeds 64 bits", basis.diag[0]))
}

/// Asserted orders of x_1 keyed by (p, f).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssumptionLedger {
    entries: BTreeMap<(u64, u64), LedgerEntry>,
}

impl AssumptionLedger {
    /// Parses and validates: every order must be odd and divide the odd
    /// part of d_1 for its (p, f).
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let mut ledger = Self::default();
        for (line, f) in data_lines(text) {
            if f.len() < 3 {
                return Err(DataError::Parse {
                    line,
                    message: format!("expected at least 3 fields, found {}", f.len()),
                });
            }
            let entry = LedgerEntry {
                p: parse_field(line, "p", f[0])?,
                f: parse_field(line, "f", f[1])?,
                order: parse_field(line, "order", f[2])?,
                provenance: f.get(3).copied().unwrap_or("").to_string(),
            };
            ledger.insert(entry)?;
        }
        Ok(ledger)
    }

    pub fn insert(&mut self, entry: LedgerEntry) -> Result<(), DataError> {
        let err = |message: String| DataError::Ledger {
            p: entry.p,
            f: entry.f,
            message,
        };
        if entry.order.is_multiple_of(2) {
            return Err(err(format!("order {} is even", entry.order)));
        }
        let odd = odd_part_of_d1(entry.p, entry.f).map_err(err)?;
        if odd % entry.order != 0 {
            return Err(err(format!(
                "order {} does not divide the odd part {odd} of d_1",
                entry.order
            )));
        }
        self.entries.insert((entry.p, entry.f), entry);
        Ok(())
    }

    pub fn shipped() -> Self {
        Self::parse(SHIPPED_LEDGER).expect("shipped ledger is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self, DataError> {
        Self::parse(&read(path)?)
    }

    /// `ledger.tsv` under `PPSCERT_DATA_DIR` if set, else the shipped copy.
    pub fn from_env() -> Result<Self, DataError> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => Self::from_file(&Path::new(&dir).join(LEDGER_FILE)),
            None => Ok(Self::shipped()),
        }
    }

    pub fn get(&self, p: u64, f: u64) -> Option<&LedgerEntry> {
        self.entries.get(&(p, f))
    }

    pub fn entries(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.values()
    }
}
