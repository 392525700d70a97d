//! Sampling, exact search and second-moment verification for rainbow
//! Hamilton cycles and rainbow perfect matchings in randomly
//! edge-coloured random regular multigraphs.
//!
//! A rainbow Hamilton cycle uses every colour exactly once. This crate
//! samples the underlying random models (the configuration model with
//! equitable edge colourings), counts rainbow structures exactly,
//! tallies the short-cycle statistics that drive the second-moment
//! analysis, and evaluates every closed-form expectation, rate and
//! limit in exact rational arithmetic so that simulation and theory can
//! be held against each other instance by instance.
//!
//! ```
//! use rainbow_lab::config_model::{sample_pairing, project_multigraph, DegreeSpec};
//! use rainbow_lab::colouring::sample_colouring;
//! use rainbow_lab::search::{count_rainbow_hamilton, SearchMode};
//!
//! let spec = DegreeSpec::new(10, 8).unwrap();
//! let graph = project_multigraph(&sample_pairing(spec, 1));
//! let colouring = sample_colouring(&graph, 10, 4, 2).unwrap();
//! let found = count_rainbow_hamilton(&graph, &colouring, SearchMode::Count).unwrap();
//! assert_eq!(found.exists, found.count > 0);
//! ```
//!
//! The narrative guide lives in `book/` (an mdBook); its code blocks
//! are compiled with the crate's doctests through the [`book`] module,
//! so the guide cannot drift from the API.

pub mod census;
pub mod colouring;
pub mod config_model;
pub mod error;
pub mod exact;
pub mod mc;
pub mod numeric;
pub mod rng;
pub mod search;
pub mod theory;
pub mod variance;

pub use error::{Error, Result};

/// The chapters of the mdBook guide, included here so that every code
/// block in the book is built and run by `cargo test`.
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/pairing-model.md")]
    pub mod pairing_model {}
    #[doc = include_str!("../../../book/src/colourings-and-traffic.md")]
    pub mod colourings_and_traffic {}
    #[doc = include_str!("../../../book/src/counting-rainbow-structures.md")]
    pub mod counting_rainbow_structures {}
    #[doc = include_str!("../../../book/src/cycle-census.md")]
    pub mod cycle_census {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    pub mod closed_forms {}
    #[doc = include_str!("../../../book/src/second-moment.md")]
    pub mod second_moment {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
