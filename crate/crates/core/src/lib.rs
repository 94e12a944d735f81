//! Exact-arithmetic toolkit for experimental Diophantine approximation.
//!
//! The crate is organised by task:
//!
//! * [`heights`]: rationals, real algebraic numbers, Weil heights and
//!   Liouville-type lower bounds.
//! * [`expr`]: a small expression language with interval and Taylor-jet
//!   evaluation.
//! * [`lattice`]: LLL reduction and an approximate Thue–Siegel solver.
//! * [`auxpoly`]: auxiliary polynomials that are small on a parametrized set.
//! * [`approx`]: enumeration of low-height points, certified distances,
//!   counting, exponent fitting and scripted examples.
//! * [`rootsum`]: minimal nonzero sums of roots of unity.

pub mod algebra;
pub mod approx;
pub mod auxpoly;
pub mod combin;
pub mod error;
pub mod expr;
pub mod croots;
pub mod factor;
pub mod heights;
pub mod interval;
pub mod lattice;
pub mod multipoly;
pub mod poly;
pub mod power;
pub mod rootsum;
pub mod serde_util;

pub use error::{Error, Result};
pub use expr::{Domain, Expr};
pub use interval::Interval;
pub use power::PowerProduct;
pub use rug::{Integer, Rational};

/// Version string echoed into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
