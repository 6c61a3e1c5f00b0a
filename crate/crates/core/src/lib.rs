//! Outage probability of a three-node network (source, destination, and an
//! amplify-and-forward relay powered by harvested energy) over Rayleigh
//! fading.
//!
//! [`analytic`] has the closed forms, [`simulate`] a seeded Monte Carlo
//! engine that runs the relaying protocol block by block and serves as an
//! independent check on them.

pub mod analytic;
pub mod error;
pub mod model;
pub mod simulate;

pub use analytic::DiversityFit;
pub use error::{Error, Result};
pub use model::{validate, EnergyModel, Scenario, SystemParams};
pub use simulate::{ChannelDraw, MonteCarlo, OutageEstimate};
