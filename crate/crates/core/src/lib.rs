//! Secrecy-capacity analysis for clustered distributed storage systems.
//!
//! The crate has three layers:
//!
//! * closed-form evaluators for the storage capacity and the eavesdropper
//!   bounds under uniform and intra/cross-split repair bandwidth
//!   ([`bounds`]),
//! * an information-flow-graph model with an exact rational min-cut and an
//!   exhaustive small-instance search that certifies the closed forms
//!   against every repair schedule and eavesdropper placement
//!   ([`flowgraph`], [`oracle`]),
//! * a pairwise-repetition storage layout with a coset precode that attains
//!   the node-restricted bound and provably leaks nothing ([`rskr`], [`gf`]).
//!
//! All values are exact rationals ([`exact::Rat`]); nothing in the numeric
//! paths goes through floating point.

pub mod bounds;
mod combinatorics;
pub mod error;
pub mod exact;
pub mod flowgraph;
pub mod gf;
pub mod oracle;
pub mod rng;
pub mod rskr;
pub mod topology;

pub use error::{Error, Result};
pub use exact::{Alpha, Rat};
pub use topology::{
    asymmetric_bandwidth, make_topology, symmetric_bandwidth, AdversarySpec, BandwidthModel,
    ClusterTopology,
};
