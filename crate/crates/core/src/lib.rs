//! Outage and area spectral efficiency of a frequency-hopping SC-FDMA
//! millimeter-wave cellular uplink over an arbitrary base-station layout.
//!
//! The crate builds network realizations ([`topology`]), reduces the link
//! from a reference mobile to its serving sector to an
//! [`radio::InterferenceProfile`], evaluates the exact conditional outage
//! probability of that profile ([`outage`]), and averages over many
//! realizations ([`experiment`]). [`oracle`] estimates the same outage by
//! brute-force sampling of the SINR.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod oracle;
pub mod outage;
pub mod par;
#[cfg(test)]
mod properties;
pub mod propagation;
pub mod radio;
pub mod stream;
pub mod topology;

pub use error::{Error, Result};
