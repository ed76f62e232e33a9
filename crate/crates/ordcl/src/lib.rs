//! Cumulative link models for ordinal data.
//!
//! This crate fits cumulative link models (proportional odds, proportional
//! hazards and probit variants, including partial proportional-odds
//! specifications) by maximum likelihood, by one-step bias correction, and by
//! bias reduction through iterated maximum likelihood fits on adjusted
//! multinomial counts. On top of the fitting machinery it provides Wald and
//! adjusted-score inference, boundary diagnostics for infinite or tied
//! estimates, and study engines: exact complete enumeration of 2×k tables
//! with fixed row totals, Monte Carlo simulation, and a shrinkage scan of
//! fitted probabilities.
//!
//! The study engines run their independent table fits and replicates in
//! parallel through rayon when the `parallel` feature (on by default) is
//! enabled; without it everything runs sequentially.

pub mod error;
pub mod estimation;
pub mod inference;
pub mod linalg;
pub mod links;
pub mod model;
pub mod parallel;
pub mod studies;

pub use error::{Error, Result};
pub use links::LinkFamily;
