//! Certificates of non-existence for perfect p-ary and almost p-ary
//! sequences, with independent replay.

mod certify;
mod data;
mod deduce;
mod density;
mod search;
mod types;
mod verify;

pub use certify::{
    certify, certify_paps, certify_pps_3mod4, certify_pps_5mod8, digest_json, qp_test,
    CertifyOptions, Certifier, QpTest, DEFAULT_L_MAX, MAX_P_3MOD4,
};
pub use data::{
    odd_part_of_d1, AssumptionLedger, DataError, PolyStore, CLASS_POLYS_FILE, DATA_DIR_ENV,
    LEDGER_FILE,
};
pub use deduce::{
    annihilates, coefficients_mod, deduce_class_relation, DeduceError, Deduction, R_NORM, R_ORBIT,
    R_PAIR, R_PARITY,
};
pub use density::{density_bound, DensityError};
pub use search::{
    max_unsolvable_l, replay_witness, solvable, solvable_by_residues, solvable_plain, SearchError,
};
pub use types::*;
pub use verify::{
    verify_certificate, verify_certificate_json, verify_certificate_report, VerifyReport,
};
