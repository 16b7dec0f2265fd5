//! Near-field beam training with far-field DFT codebooks.
//!
//! A user inside the effective beamfocused Rayleigh distance sees a DFT beam
//! sweep as a broad plateau rather than a single peak. The width and centre
//! of that plateau locate the user in angle and range through a precomputed
//! lookup table ([`cidft`]), at the pilot cost of the far-field sweep alone.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamscan;
pub mod bench;
pub mod channel;
pub mod cidft;
pub mod codebook;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod numerics;

pub use error::{Error, Result};
