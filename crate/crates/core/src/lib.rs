//! Simulator and analytical toolkit for slotted-ALOHA-family random access
//! protocols with multi-level random transmit power and successive
//! interference cancellation under a capture threshold.
//!
//! Throughput can be obtained four ways, which cross-check each other:
//!
//! - Monte-Carlo simulation of frames and the SIC decoder ([`simulator`]),
//!   under the ideal channel or a path-loss channel ([`pathloss`]);
//! - density evolution in the infinite-frame limit, with capacity search
//!   over the load ([`de`]);
//! - closed forms for slotted ALOHA with 1, 2, or n power levels
//!   ([`analytic`]);
//! - upper bounds on what any repetition distribution can achieve
//!   ([`bounds`]).
//!
//! [`optimizer`] searches the protocol parameters (degree distribution,
//! power-choice distribution, load) for maximum lossless throughput.

pub mod analytic;
pub mod bounds;
pub mod de;
mod error;
pub mod model;
pub mod numeric;
pub mod optimizer;
pub mod pathloss;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{
    slot_occupancy_pmf, EdgePerspectiveDistribution, PowerModel, RepetitionDistribution,
    SystemConfig,
};
pub use simulator::{
    coupled_monotonicity_trial, generate_frame, monte_carlo, sic_decode, Channel, DecodeResult,
    Frame, MonteCarloEstimate,
};
