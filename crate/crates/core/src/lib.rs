//! Simulation and analysis of multi-armed bandits whose reward
//! distributions change over time.
//!
//! * [`env`] and [`scenarios`]: piecewise-constant and periodic Bernoulli
//!   environments.
//! * [`policy`]: UCB-1, discounted UCB, sliding-window UCB, EXP3.S and a
//!   clairvoyant oracle.
//! * [`episode`]: the seeded round loop and parallel replications.
//! * [`accounting`]: dynamic regret, bad plays and arm frequencies.
//! * [`theory`]: closed-form bounds and their Monte Carlo checks.
//! * [`lowerbound`]: period-shifted environments and mixture regret.

pub mod accounting;
pub mod env;
pub mod episode;
pub mod error;
pub mod lowerbound;
pub mod policy;
pub mod rng;
pub mod scenarios;
pub mod theory;
pub mod types;

pub use env::{EnvironmentSpec, PeriodicBernoulli, PiecewiseConstantBernoulli, Segment};
pub use error::{Error, Result};
pub use policy::{Policy, PolicyKind, PolicySpec};
pub use rng::{derive_stream, RngStream};
pub use types::{ArmId, EpisodeConfig, EpisodeTrace, RoundRecord};
