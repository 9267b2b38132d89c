//! Privacy-preserving cake cutting over Shamir secret shares.
//!
//! This crate simulates n parties running an envy-free, strategyproof
//! cake-cutting protocol for piecewise uniform valuations entirely over
//! (t,n) Shamir sharings, with t = ⌊(n+1)/2⌋. The agents themselves act
//! as the computation parties; a correlated-randomness dealer supplies
//! the shared random bits consumed by comparison-type gates.
//!
//! Layout:
//!
//! * [`field`], [`shamir`] — prime-field arithmetic and threshold sharing.
//! * [`engine`] — the round-synchronized party runtime, dealer tape,
//!   transcript accounting, and all secure gates (multiplication,
//!   comparison, equality, min/max, OR, LSB, halving, bit decomposition,
//!   binary long division, k-th ranked element).
//! * [`valuations`] — plaintext piecewise-uniform valuations, validation,
//!   lossless decimal quantization, and exact measures.
//! * [`phases`] — the protocol phases: valuation sharing with cheater
//!   detection, interval construction, iterative allocation (exhaustive
//!   and polynomial subset selection, oblivious max-flow assignment),
//!   and final serving.
//! * [`oracle`] — the plaintext reference algorithm the secure protocol
//!   must reproduce byte-for-byte, plus fairness and strategyproofness
//!   checkers.
//! * [`protocol`] — the end-to-end driver.
//!
//! The core is `no_std + alloc`; everything needing files, clocks or
//! statistics lives in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod engine;
pub mod field;
pub mod oracle;
pub mod phases;
pub mod protocol;
pub mod shamir;
pub mod valuations;

pub use engine::{Engine, EngineConfig, GateKind, Transcript};
pub use field::{FieldElement, PrimeModulus};
pub use protocol::{RunConfig, RunError, RunOutcome, SelectionMode, Visibility};
pub use shamir::{PartyId, ShareParams, Sharing};
pub use valuations::{Frac, IntegerValuation, PiecewiseUniformValuation};
