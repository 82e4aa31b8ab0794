//! Predictive flocking control by Markov-random-field screening of
//! discretized control inputs.
//!
//! Each follower enumerates a finite set of accelerations, predicts where
//! each would take it over a short horizon, and scores the predicted states
//! with potential functions. A mean-field approximation of the joint
//! distribution over all agents' candidates picks one input per follower,
//! which is then low-pass filtered.

pub mod config;
pub mod control_space;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod mrf;
pub mod potentials;
pub mod sim;
pub mod vec2;

pub use config::ScenarioConfig;
pub use control_space::{ControlCandidate, DiscretizationConfig};
pub use dynamics::{AgentState, Bounds};
pub use error::{FlockError, Result};
pub use metrics::MetricsRecord;
pub use mrf::{Belief, ControllerConfig, NeighborGraph};
pub use potentials::PotentialParams;
pub use sim::{run_simulation, SimulationLog};
pub use vec2::Vec2;
