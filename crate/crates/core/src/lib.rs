//! Rainbow subdivision toolkit for properly edge-coloured graphs.
//!
//! The library builds rainbow clique subdivisions by composing five layers:
//! exact d-minimal subgraph extraction (`density`), expander extraction and
//! greedy edge-disjoint coverings (`expander`), layered rainbow reachability
//! and two-colour-group path stitching (`search`), the greedy subdivision
//! builder with its density-increment driver (`subdivision`), and brute-force
//! ground-truth verifiers (`oracle`). Instance generators live in
//! `instances`; all density comparisons use exact rationals.

#![forbid(unsafe_code)]

/// Schema tag stamped into every serialized certificate and report.
pub const SCHEMA_VERSION: &str = "1";

pub mod density;
pub mod expander;
mod flow;
pub mod graph;
pub mod instances;
pub mod oracle;
pub mod rational;
pub mod search;
pub mod subdivision;
