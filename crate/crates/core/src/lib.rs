//! Two-parameter small quantum groups u_{r,s}(g) at roots of unity.
//!
//! The crate builds u_{r,s}(sl_n) and its Borel part exactly over a cyclotomic
//! field, provides the Hopf structure maps, computes dimensions of simple
//! Yetter-Drinfeld modules through Radford's construction, and classifies
//! parameter pairs (r, s) = (ζ^x, ζ^y) into isomorphism classes.

pub mod cache;
pub mod cartan;
pub mod classify;
pub mod cyclotomic;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod pbw;
pub mod radford;
pub mod reference;
pub mod rewrite;

pub use cyclotomic::{CyclotomicContext, Scalar};
pub use error::{Error, Result};
