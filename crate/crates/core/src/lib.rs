//! Exact fundamental limits of fixed-to-variable and fixed-length lossless
//! compression at small blocklengths, the matching sample-complexity bounds,
//! and the universal collision-based uniformity test.

pub mod bounds;
pub mod compressors;
pub mod error;
pub mod formats;
pub mod linalg;
pub mod numeric;
pub mod oracles;
pub mod par;
pub mod pmf;
pub mod sources;
pub mod universal;

pub use error::{Error, Result};
pub use oracles::{ComplexityOracle, OracleConfig, Variant};
pub use par::Execution;
pub use pmf::{DivergenceSuite, Pmf};
pub use sources::{MarkovSource, MemorylessSource, Source, SpectralReport};
