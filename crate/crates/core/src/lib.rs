//! Low-discrepancy point sets (Faure, Halton and their generalizations),
//! digit randomizations, and the C_b(k) pair-count quality criterion.

pub mod error;
pub mod exec;
pub mod numth;
pub mod permute;
pub mod sequences;
pub mod randomize;
pub mod negdep;
pub mod integrands;
pub mod experiments;
pub mod presets;

pub use error::{Error, Result};
pub use exec::Exec;
