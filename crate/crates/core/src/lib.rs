//! Non-malleable codes against bounded tampering families.
//!
//! * [`gf2x`]: GF(2^m) arithmetic, dense polynomials, root finding.
//! * [`code`]: the sparse table construction, the polynomial Monte Carlo
//!   construction and the parameter planner.
//! * [`tamper`]: compact tampering functions and fixed-point statistics.
//! * [`harness`]: outcome distributions and non-malleability error metrics.
//! * [`attacks`]: adversaries realizing the known impossibility arguments.
//! * [`persist`]: versioned JSON for built codes.

pub mod attacks;
pub mod code;
pub mod gf2x;
pub mod harness;
mod hexfmt;
pub mod persist;
pub mod tamper;

pub use code::{CodeError, CodeParams, CodingScheme, MonteCarloCode, TableCode};
pub use gf2x::{FieldElement, FieldSpec, Poly};
pub use harness::{EvalMode, Outcome, OutcomeDist};
pub use persist::StoredCode;
pub use tamper::{FamilyKind, TamperSpec};
