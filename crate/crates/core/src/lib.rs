//! Quantization dimension of self-similar measures.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`ifs`]: similitudes, weighted iterated function systems, words, sub-systems,
//!   attractor hulls and the Hutchinson operator on discrete measures.
//! * [`separation`]: strong separation / open set checks and the search for
//!   separated sub-systems.
//! * [`dimension`]: the implicit dimension equation, its `r -> 0` limit and
//!   dimension-vs-order curves.
//! * [`quantizer`]: chaos-game sampling, generalized Lloyd codebooks and
//!   empirical dimension fits.
//! * [`measures`]: finite Dirac mixtures with convolution, translation,
//!   mixing, the Monge-Kantorovich metric and total variation.

// `!(x <= tol)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimension;
mod error;
mod geometry;
mod transport;
pub mod ifs;
pub mod measures;
pub mod quantizer;
pub mod separation;

pub use error::{Error, Result};
pub use ifs::{Aabb, Similitude, SubWifs, Wifs, Word};
pub use measures::DiscreteMeasure;
