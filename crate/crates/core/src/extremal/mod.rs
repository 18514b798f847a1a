//! Extremal search over the cone and scans along the analytic test
//! families.

mod nelder_mead;
mod scans;
mod search;

pub use nelder_mead::{minimize, NelderMeadConfig, NelderMeadResult};
pub use scans::{family_norms, family_scan, keps_scan, FamilyNorms, FamilyScan, KepsRow};
pub use search::{decode, search, SearchConfig, SearchMode, SearchResult, TracePoint};
