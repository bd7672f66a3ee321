//! Exact linear forms in zeta values, oscillating subsequences chosen by
//! Kronecker–Weyl equidistribution, and the irrationality-measure bounds
//! they feed.

pub mod criterion;
pub mod exact;
pub mod highprec;
pub mod linear_forms;
pub mod oscillation;
pub mod zeta;

pub use exact::{BigRat, TruncatedSeries};
pub use highprec::HighPrecReal;
pub use linear_forms::{FactoredRationalFunction, PartialFractionExpansion, ZetaLinearForm};
pub use oscillation::{AnglePair, SubsequencePlan};
pub use zeta::ZetaTable;
