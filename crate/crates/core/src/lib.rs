//! Causal-structure discovery with the PC algorithm, patterns over observed
//! variables when latent confounders are present, and causal-claim queries
//! that only answer with a checkable witness.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: DAGs, hybrid graphs (patterns), path and ancestry queries
//! - [`format`]: the line-oriented text graph format
//! - [`dsep`]: d-separation by enumeration and by reachability
//! - [`pc`]: the PC algorithm over a [`pc::CiOracle`]
//! - [`latent`]: restricted patterns and inducing-path oracles
//! - [`claims`]: semi-directed paths and definite-cause certificates
//! - [`search`]: bounded search for counterexamples to the strengthened claim
//! - [`enumerate`]: exhaustive and canonical DAG enumeration
//! - [`sem`], [`citest`], [`bench`]: linear-Gaussian simulation, Fisher-z
//!   testing and the Monte Carlo error-rate harness
//! - [`cli`]: the command-line front end used by the `latentpc` binary

pub mod bench;
pub mod citest;
pub mod claims;
pub mod cli;
pub mod dsep;
pub mod enumerate;
pub mod format;
pub mod graph;
pub mod latent;
pub mod pc;
pub mod search;
pub mod sem;

pub use graph::{Dag, EdgeKind, EndpointMark, GraphError, MarkedGraph, Path, Pattern, VertexId, VertexSet};
