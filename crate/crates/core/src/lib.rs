//! Surrogate-assisted generative design of airless-tire spoke profiles.
//!
//! The crate is organised around the design loop:
//!
//! * [`geometry`] rebuilds the reference spoke from its polynomial fits,
//!   perturbs it with PCHIP knot offsets under an area-equivalence
//!   constraint and extracts the 19 surrogate input features.
//! * [`evaluator`] scores profiles, either with the deterministic analytic
//!   proxy (including the vibration signal, FFT and band-RMS chain) or by
//!   ingesting externally computed datasets.
//! * [`surrogate`] trains kernel ridge and gradient-boosted tree predictors
//!   with standardization and k-fold grid search.
//! * [`optimizer`] holds particle swarm and Bayesian optimization, Pareto
//!   archives, hypervolume and EHVI.
//! * [`pipeline`] wires everything into archived campaigns and SVG reports.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod optimizer;
pub mod pipeline;
pub mod surrogate;

pub use error::{Error, Result};
