//! Causal linear (tree) codes over GF(2) with anytime reliability.
//!
//! This crate holds the algorithmic core: dense GF(2) linear algebra,
//! Toeplitz code construction and sampling, brute-force weight-spectrum
//! enumeration and certification, a streaming maximum-likelihood erasure
//! decoder, closed-form rate/exponent thresholds, and the closed-loop
//! plant simulation primitives. It is `no_std` (with `alloc`); all IO,
//! file formats and the CLI live in the companion `anytime-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bitlinalg;
pub mod bounds;
pub mod channel;
pub mod code;
pub mod control;
pub mod decode;
pub mod rng;
pub mod spectrum;

pub use bitlinalg::BitMatrix;
pub use channel::ChannelModel;
pub use code::{CodeParams, ToeplitzGenerator, ToeplitzParityCheck};
pub use decode::DecoderState;
pub use rng::Rng64;
pub use spectrum::{AnytimeCertificate, WeightSpectrum};
