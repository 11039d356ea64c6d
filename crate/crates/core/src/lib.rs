//! Desk-scale toolkit for coarse geometry on finite truncations.
//!
//! The crate builds finite extended metric spaces and the standard
//! large-scale constructions over them: products and coproducts, coarse
//! gluings and coequalisers, kernel and quotient filtrations with exact
//! stability profiles, and augmented weighted Rips graphs with the
//! quantitative comparisons between the metrics they induce. A gallery of
//! deterministic generators supplies the worked example families (comb,
//! comb retraction, Heisenberg balls, cubes-to-squares, lattice
//! projections), and the scenario layer packages the headline checks into
//! reproducible batch runs with CSV/JSON reports.
//!
//! All inputs of interest are integral and every comparison on them is
//! exact; float inputs fall back to a 1e-9 additive tolerance. Heavy sweeps
//! (per-source shortest paths, pair searches, trial batches) are data
//! parallel via rayon behind the default `parallel` feature; disabling it
//! yields a sequential build with identical outputs.

pub mod control;
pub mod dist;
pub mod error;
pub mod filtration;
pub mod gallery;
pub mod glue;
pub mod graph;
pub mod instances;
pub mod json;
pub mod map;
pub mod oracle;
mod par;
pub mod rips;
pub mod scenario;
pub mod space;
pub mod trend;

pub use dist::Dist;
pub use error::{Error, Result};
pub use map::MappedPair;
pub use space::{Space, SpaceRef};
