//! Simulation and verification toolkit for Bulgarian solitaire and its
//! stochastic relatives.
//!
//! The card-based game (every card independently joins the new pile with
//! probability `p`) drives Young diagrams toward the shape `e^{-x}` under
//! scaling `1/p`. This crate simulates it alongside the deterministic and
//! pile-based games, measures exact sup-norm distances of rescaled diagram
//! boundaries, evaluates the Chernoff-type deviation bounds, and provides an
//! exact transition-matrix oracle for small `n`.
//!
//! Modules:
//!
//! * [`partition`]: partitions, weak compositions, boundary step functions
//!   and exact distances;
//! * [`engine`]: the three game dynamics and seeded trajectories;
//! * [`bounds`]: Chernoff bounds and finite-`n` deviation bounds;
//! * [`exact`]: exact transition matrix and stationary distribution;
//! * [`experiments`]: ensemble experiments built on the above;
//! * [`report`] and [`plot`]: CSV/JSON serialization and SVG output.

pub mod bounds;
pub mod engine;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod partition;
pub mod plot;
pub mod report;
pub mod rng;

pub use engine::{GameParams, GameState, Trajectory, Variant};
pub use error::{Error, Result};
pub use partition::{
    ord, restricted_distance, sup_distance, Diagram, Exponential, Partition, Reference, Region,
    Shape, StepFunction, WeakComposition,
};
