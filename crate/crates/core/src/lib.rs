//! Multipartite Bell inequalities as device-independent witnesses of
//! entanglement depth: exact local bounds, quantum and k-producible values,
//! and graph-state inequalities synthesized from GHZ paradoxes.

pub mod bellexpr;
pub mod error;
pub mod graphwit;
pub mod qcore;
pub mod reference;
pub mod reproduce;
pub mod seesaw;
pub mod witness_gamma;

pub use error::{Error, Result};
