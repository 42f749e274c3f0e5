//! Koopman operator approximation from partially and non-uniformly
//! sampled state data.
//!
//! Each state component is lifted into its own delay embedding and
//! propagated with a per-component Hankel-DMD generator to common target
//! times; the reconstructed full states then feed a standard EDMD fit on a
//! monomial dictionary.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod edmd;
pub mod error;
pub mod hankel;
pub mod linalg;
pub mod observables;
pub mod warning;

pub use error::{Error, Result};
pub use warning::Warning;
