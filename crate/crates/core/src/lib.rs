//! Exact graph calculus for Berezin, Berezin-Toeplitz and
//! Karabegov-Bordemann-Waldmann star products: enumeration of pointed
//! multigraphs, formal graph series with rational coefficients, and
//! checks of the combinatorial identities relating them.

pub mod canon;
pub mod enumerate;
pub mod error;
pub mod golden;
pub mod graph;
pub mod karabegov;
pub mod random;
pub mod report;
pub mod series;
pub mod spectral;
pub mod substitute;
pub mod suites;

pub use canon::CanonicalKey;
pub use enumerate::{
    count_table, enumerate, enumerate_graphs, CountTable, EnumSpec, Family, GraphRecord,
    StabilityClass,
};
pub use error::{Error, Result};
pub use graph::{EdgeRef, FamilySet, PointedGraph};
pub use report::{Failure, VerificationReport};
pub use series::{GraphSeries, Horizon, Mode};

/// Exact rational coefficient.
pub type Rational = num_rational::Ratio<i128>;
