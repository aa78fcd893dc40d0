//! Numerical spectral laboratory for magnetic Dirichlet layers.
//!
//! A charged particle confined to a layer of half-width `a` built over a
//! translation-invariant surface, in a homogeneous field `B0`, has a
//! Hamiltonian that decomposes into fiber operators `H[xi]` over the
//! momentum `xi` along the invariant direction. This crate discretizes
//! those fibers (and the related half-plane, transverse, thin-layer and
//! Iwatsuka fibers), computes their low-lying band functions, and checks
//! them against closed-form spectra, asymptotics and non-constancy
//! certificates.
//!
//! Branch indexing: band functions are 1-based in sorted order
//! (`lambda_1 <= lambda_2 <= ...`). Landau-level labels (`B0 (2m + 1)`) are
//! 0-based, so Landau index `m` corresponds to sorted branch `m + 1`.

// Negated comparisons reject NaN inputs on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bands;
pub mod closedform;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod iwatsuka;
pub mod jet;
pub mod linalg;
pub mod output;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
