//! Generalized bilateral weighted shifts `T_{U,W}` on a truncated standard
//! Hilbert module over compact operators, numerical checkers for their
//! hypercyclicity and chaos conditions, and the abstract shift `T_{Phi,b}` on
//! C*-algebras.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod constructions;
pub mod criteria;
pub mod cstar;
pub mod error;
pub mod module_space;
pub mod operator;
pub mod random;
pub mod shift;

pub use error::{Error, Result};
