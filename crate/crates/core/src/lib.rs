//! Connected graphs with prescribed degrees.
//!
//! The crate computes the exponential rate `K(p)` at which connected graphs
//! thin out among all graphs with degree law `p`, builds the enlarged degree
//! sequence whose configuration-model giant has type close to a target, and
//! provides the samplers, switchings and exhaustive oracles used to check all
//! of it at small and moderate sizes.
//!
//! Module map:
//! - [`degrees`]: distributions, type sequences, size-biasing
//! - [`rate`]: extinction root, `K(p)`, giant degree law
//! - [`embedding`]: truncation and the enlarged type sequence
//! - [`confmodel`]: configurations, projection, components
//! - [`switching`]: degree-preserving rewiring and connect-repair
//! - [`oracle`]: exact enumeration
//! - [`census`]: neighbourhood census, branching-process tree laws, exact samplers
//! - [`experiments`]: Monte Carlo runners shared by the CLI and the acceptance suite

pub mod census;
pub mod confmodel;
pub mod degrees;
mod dsu;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod par;
pub mod rate;
pub mod switching;

pub use degrees::{DegreeDistribution, SizeBiasedDistribution, TypeSequence};
pub use error::{Error, Result};
