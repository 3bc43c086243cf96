//! Sequential secant and cord derivatives of real functions.
//!
//! The library computes Newton and cord difference quotients along null
//! sequences, estimates the sets of their subsequential limits on the
//! extended real line, and predicts those sets analytically for two-slope
//! functions sampled along polynomially or exponentially decaying sequences.
//!
//! Modules, bottom up:
//!
//! * [`extreal`]: extended reals, the arctangent chart, closed sets.
//! * [`seqgen`]: null sequences `h_n ↘ 0` and their decay rates.
//! * [`gallery`]: the example functions.
//! * [`quotient`]: difference-quotient engines and traces.
//! * [`dioph`]: continued fractions and rotation-number witnesses.
//! * [`limitset`]: limit-set estimation, target search and predictors.
//! * [`verify`] and [`cli`]: the check suites and the command-line front end.

// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dioph;
pub mod error;
pub mod extreal;
pub mod gallery;
pub mod limitset;
pub mod quotient;
pub mod seqgen;
pub mod verify;

pub use error::{Error, Result};
pub use extreal::{ClosedExtSet, ExtReal};
pub use gallery::GalleryFunction;
pub use quotient::{QuotientEngine, QuotientTrace};
pub use seqgen::DecaySequence;
