//! Numerical models of pairs of commuting isometries.
//!
//! A pair `(V1, V2)` whose product is a shift is determined by a BCL triple
//! `(W, U, P)`. This crate works with finite triples and with truncated matrix
//! models of the infinite-dimensional building blocks, and computes the defect
//! operator `C = I - V1V1* - V2V2* + V1V2V1*V2*`, the cross-commutator
//! `[V2*, V1]`, and the fundamental sequence that classifies pairs whose
//! cross-commutator is compact and normal.

pub mod analysis;
pub mod bcl;
pub mod classify;
pub mod error;
pub mod frame;
pub mod io;
pub mod izuchi;
pub mod linalg;
pub mod models;
pub mod spectral;
pub mod toeplitz;
pub mod tolerance;

pub use error::{Error, Result};
