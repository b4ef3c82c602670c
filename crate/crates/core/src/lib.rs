//! Analytic orders of Tate-Shafarevich groups for quadratic twists of
//! elliptic curves.
//!
//! The crate counts representations by ternary quadratic forms to get the
//! weight-3/2 coefficients a(d), evaluates L(E,1) by a truncated Dirichlet
//! series, runs a two-isogeny descent for one fixed pair of curves, and
//! accumulates the counting statistics over large twist families.

pub mod arith;
pub mod curves;
pub mod descent;
pub mod error;
pub mod family;
pub mod lvalue;
pub mod precision;
pub mod stats;
pub mod theta;
pub mod twists;

pub use error::{Error, Result};
