//! Building blocks for studying low-distortion embeddings of sparse random
//! graphs into low-dimensional normed spaces.
//!
//! The crate is organised around five areas:
//!
//! - [`matchings`]: matchings as involutive functions on `[n]`, partially
//!   constructed matchings with committed non-edges, exact completion counts,
//!   uniform and conditional sampling, and the incidence tail estimate.
//! - [`graph`]: the Hamiltonian-cycle-plus-partial-matching multigraph, BFS
//!   balls, spheres and frontier sets, growth radii and structural checks.
//! - [`geometry`]: norm oracles on `R^d`, projections and finite nets.
//! - [`discretization`]: the seeded multiscale discretization of sparse point
//!   tuples together with runtime checks of its distance guarantees.
//! - [`embedding`]: the embedding relation between graph metrics and point
//!   tuples, distortion, baseline embeddings and a local-search heuristic.
//!
//! Vertex indices are 0-based in the API and 1-based in every file format
//! (see [`formats`]). All randomness flows through explicitly seeded
//! generators derived with [`seeding`].

pub mod discretization;
pub mod embedding;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod graph;
pub mod matchings;
pub mod seeding;
pub mod stats;

pub use error::{Error, Result};
