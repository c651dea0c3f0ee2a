//! Exact symbolic engine for Moyal-type star products whose bi-vector field
//! carries abstract propagator coefficients `K[f;i,j]`.
//!
//! Everything in this crate is `no_std` + `alloc`: coefficients are exact
//! rationals, `hbar` is a formal exponent slot, and polynomials are kept in a
//! canonical sparse form so that equality is structural.
//!
//! The layers build on each other:
//!
//! * [`algebra`]: the coefficient algebra and polynomials over it, with
//!   tensor blocks realised as tags on variables.
//! * [`star`]: truncated exponentials of the propagator bi-vector field, the
//!   Poisson bracket, and the change of propagator.
//! * [`combinat`]: adjacency matrices, multinomials, admissible sequences and
//!   the two-row tableau construction.
//! * [`graphs`]: Bernoulli-type graphs, their evaluation as poly-differential
//!   operators, and the correspondence with loop-free Feynman multigraphs.
//! * [`wick`]: Wick powers, the Wick theorem in coordinates and expectations.
//! * [`fields`]: numeric specialisation of symbolic results on sampled
//!   kernels and field values.
#![no_std]

extern crate alloc;

pub mod algebra;
pub mod combinat;
mod error;
pub mod fields;
pub mod graphs;
pub mod star;
pub mod wick;

pub use error::{Error, Result};

pub use algebra::{CoeffElement, CoeffMonomial, Poly, PropagatorSymbol, Rational, Var, VarMonomial};
pub use combinat::{AdjacencyMatrix, IntSequence, TwoRowSsyt};
pub use graphs::{BernoulliGraph, FeynmanGraph};
pub use star::{PropagatorMatrix, TruncationOrder};
