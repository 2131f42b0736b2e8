//! Multiple hidden Markov models for multivariate categorical time series.
//!
//! An observed multivariate categorical series is driven by a multivariate
//! latent Markov chain. Independence hypotheses are declared as mixed-chain
//! graphs ([`graph`]), translated into zero restrictions on marginal
//! interaction parameters ([`param`], [`constraints`]) and fitted by
//! constrained EM ([`fit`]). Nested fits are compared with likelihood ratio
//! tests and AIC ([`selection`]).
//!
//! The crate is `no_std` and needs only `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod constraints;
pub mod error;
pub mod fit;
pub mod graph;
pub mod model;
pub mod param;
pub mod scheme;
pub mod selection;
pub mod varset;

pub use constraints::{ConstraintSet, Provenance, Schemes};
pub use error::{Error, ErrorCategory, Result};
pub use fit::{em_fit, FitOptions, FitResult, Hypothesis, ModelSpec};
pub use graph::{Block, GraphBuilder, IndependenceStatement, MixedChainGraph, NodeId, Structure};
pub use model::{MhmmModel, ObservedSeries};
pub use param::{ConditionalTable, InteractionIndex, InteractionTable, Parameterization, Target};
pub use scheme::{Variable, VariableScheme};
pub use varset::VarSet;
