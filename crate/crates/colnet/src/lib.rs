//! Word collocation network analysis.
//!
//! Turns text corpora into collocation networks (six variants over bigrams
//! and trigrams), measures their global complex-network properties
//! (diameter, clustering, small-worldliness, power-law degree exponents with
//! bootstrap goodness-of-fit), compares property distributions between
//! groups of documents with significance tests, and traces how properties
//! evolve while edges are added incrementally.

pub mod cli;
pub mod corpus;
pub mod graphalg;
pub mod incremental;
pub mod metrics;
pub mod netbuild;
pub mod powerlaw;
pub mod stats;
