//! Certifier for the non-existence of perfect p-ary sequences (PPS) and
//! perfect almost p-ary sequences (PAPS) of given types.

pub mod matrix;
pub mod ntheory;
pub mod cyclotomic;
pub mod lattice;
pub mod quadforms;
pub mod stickelberger;
pub mod certifier;
