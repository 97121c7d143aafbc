//! Out-of-distribution detection for short-range FMCW radar.
//!
//! A walking person is the in-distribution class; every other moving object
//! in view should be flagged. The crate covers the whole chain: synthetic
//! ADC frames ([`radar`]), range-Doppler preprocessing ([`dsp`]), a small
//! reverse-mode network engine ([`nn`]), the patch-based autoencoder
//! ([`ae`]), reconstruction and latent-energy scores ([`score`]), ranking
//! metrics ([`metrics`]) and the file-driven pipeline ([`pipeline`]).

pub mod ae;
pub mod dsp;
pub mod error;
pub mod io;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod radar;
pub mod score;

pub use error::{Error, Result};
