//! Variations on the bilateral problem: learning over repeated periods,
//! costly monitoring, renegotiation risk, report-dependent menus, a
//! competitive bidding format and two-dimensional types.

pub mod auction;
pub mod dynamic;
pub mod menu;
pub mod monitoring;
pub mod renegotiation;
pub mod two_dim;
