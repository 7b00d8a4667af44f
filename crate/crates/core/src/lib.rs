//! Regular maps with Euler characteristic `-pq`: explicit group families,
//! map invariants, and an exhaustive search used as an existence oracle.

pub mod fields;
pub mod groups;
pub mod maps;
pub mod families;
pub mod classify;
pub mod cli;
