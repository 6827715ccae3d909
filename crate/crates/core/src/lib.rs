//! Handoff-aware rate outage analysis and traffic-flow optimization for a
//! corridor of THz base stations serving connected autonomous vehicles.
//!
//! The crate models a finite corridor of equally spaced THz base stations
//! (TBSs): Beer-Lambert path loss with molecular absorption, Nakagami-m
//! fading, beam-alignment interference, handoff-discounted Shannon rates,
//! and a log-normal vehicle-headway traffic model. Closed-form outage
//! probabilities (via a Welch-Satterthwaite Gamma reduction and the
//! generalized Beta-prime ratio law) are validated against a seeded,
//! parallelism-invariant Monte-Carlo sampler, and a density/speed optimizer
//! maximizes macroscopic traffic flow under collision-avoidance, outage,
//! and minimum-flow constraints.

pub mod absorption;
pub mod error;
pub mod link;
pub mod mobility;
pub mod montecarlo;
pub mod optimizer;
pub mod scenario;
pub mod special;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
pub use scenario::{CorridorScenario, TrafficParams};
