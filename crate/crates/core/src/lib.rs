//! Simulation of communication protocols that use a gravitating mass in a
//! superposition of locations, and therefore a superposition of causal orders,
//! as the only shared resource between two laboratories.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense state-vector and density-matrix algebra over an ordered
//!   list of subsystems (subsystem 0 is the most significant digit of the flat
//!   index).
//! - [`spacetime`]: Schwarzschild light-travel times, clock dilation and the
//!   proper-time thresholds that decide which causal order two events have.
//! - [`branch`]: signaling strategies, their replay under each causal order and
//!   the mass-controlled superposition of the resulting branch unitaries.
//! - [`protocols`]: teleportation in both directions for 2-, 3- and 4-order
//!   superpositions, universal channel implementation, Bell discrimination,
//!   Smolin unlocking, the product-state reduction and a correction-table search.
//! - [`acceptance`]: the end-to-end verification suite shared by the test
//!   target and the `icausal accept` command.

pub mod acceptance;
pub mod branch;
mod error;
pub mod oracles;
pub mod par;
pub mod protocols;
pub mod qcore;
pub mod spacetime;

pub use error::{Error, Result};

/// Tolerance for numerical assertions on protocol outputs.
pub const ASSERT_TOL: f64 = 1e-10;
/// Tolerance for identities between exactly representable constructions.
pub const EXACT_TOL: f64 = 1e-12;
/// Outcomes below this probability are reported without a collapsed state.
pub const NULL_PROBABILITY: f64 = 1e-12;
