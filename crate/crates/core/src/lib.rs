//! Root counts of linearized polynomials over GF(2^n) and the second-order
//! nonlinearity bounds they feed.

pub mod boolfn;
pub mod bounds;
pub mod cli;
pub mod field;
pub mod linpoly;
pub mod numtheory;

pub use bounds::{compare_report, BoundEntry, BoundReport, BoundsError};
pub use boolfn::{QuadraticForm, TracePolynomial, TruthTable};
pub use field::{FieldCtx, FieldElement, FieldError};
pub use linpoly::LinearizedPoly;
pub use numtheory::{ExponentSet, ShiftVector, VResult};
