//! Geometric prequantization of flat phase space `(R^2n, Σ dp_i ∧ dq_i)`.

pub mod corpus;
pub mod expr;
pub mod flow;
pub mod lift;
pub mod operator;
pub mod quantum;
pub mod scenario;
pub mod symplectic;
pub mod verify;

pub use expr::{EvalError, Observable, ParseError, Var};
pub use symplectic::{PhasePoint, TangentVector};
