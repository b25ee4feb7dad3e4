//! Random graphs from classes with forbidden cycle minors.
//!
//! The crate covers the classes Ex(C_k) (graphs whose longest cycle is
//! shorter than `k`), forests, trees and outerplanar graphs:
//!
//! * exact structural tools: block decomposition, longest cycles, minor
//!   tests, canonical forms and automorphism counts;
//! * builders and recognizers for the 2-connected block families of
//!   Ex(C5), Ex(C6) and Ex(C7), plus exhaustive census checks of them;
//! * exact labelled counting through the block decomposition, and exact
//!   uniform samplers driven by those counts (with an MCMC cross-check);
//! * the pendant-vertex transforms behind double-counting bounds on the
//!   maximum degree, with reconstruction;
//! * Monte Carlo scans of the maximum degree.

pub mod blocks;
pub mod catalog;
pub mod counting;
pub mod census;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod iso;
pub mod minors;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::{make_graph, max_degree, pendant_vertices, LabelledGraph};
pub use minors::{circumference, in_class, GraphClass};
