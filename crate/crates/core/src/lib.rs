//! Exact invariants of real quadratic fields `Q(sqrt p)`, their CM extensions with
//! extra units, and Eichler class numbers of totally definite quaternion orders.

pub mod arith;
pub mod cli;
pub mod cmfield;
pub mod error;
pub mod finite_ring;
pub mod imagquad;
pub mod numfield;
pub mod oracle;
pub mod orders;
pub mod quaternion;
pub mod realquad;

pub use arith::Rational;
pub use error::{Error, Result};
