//! Simulator and analysis library for framed slotted Aloha with multiple
//! cooperating base stations.
//!
//! Users and base stations are placed uniformly at random on the unit
//! square; each user transmits packet replicas in randomly chosen slots and
//! is heard by every station within the communication radius. Decoding is
//! modeled as peeling on the bipartite graph of users versus
//! (station, slot) check nodes. The crate provides:
//!
//! - [`geometry`]: placements, adjacency, nominal-placement classification;
//! - [`traffic`]: temporal degree distributions and frame plans;
//! - [`graph`]: the decoding graph and its degree statistics;
//! - [`decoders`]: non-cooperative, spatial, temporal, and spatio-temporal
//!   successive interference cancellation;
//! - [`analysis`]: asymptotic degree polynomials, the and-or-tree estimate
//!   of the collection probability, single-station density evolution, and
//!   threshold bounds;
//! - [`harness`]: seeded, paired Monte Carlo load sweeps with CSV output;
//! - [`fixtures`]: small hand-verified decoding examples.

pub mod analysis;
pub mod decoders;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod traffic;

pub use analysis::{AndOrOutcome, AsymptoticParams};
pub use decoders::{DecodingResult, Metrics, ScanOrder, TraceEvent, TraceKind};
pub use error::{Error, Result};
pub use geometry::{Deployment, Point2D};
pub use graph::{CheckDegreeStats, SystemGraph};
pub use harness::{DecoderKind, ExperimentConfig, LoadSweepRecord, SingleStationRecord};
pub use traffic::{FramePlan, TemporalDegreeDistribution};
