//! Numerical solvers for mixed advance/contingent supply contracts.
//!
//! A principal buys from counterparties whose type is private. Each
//! counterparty must fund working capital `K`; the principal can pay part of
//! it up front (the advance `a`) and the rest through a transfer that loads on
//! a verifiable signal (slope `b1`). Whatever the advance does not cover is
//! borrowed at a convex cost, so the advance relieves financing frictions
//! while the contingent slope screens types.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the `liqscreen` crate.

// guards like `!(x > 0.0)` are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bilateral;
pub mod calibration;
pub mod economy;
pub mod error;
pub mod extensions;
pub mod numerics;
pub mod oracle;
pub mod portfolio;

pub use error::{Error, Result};
