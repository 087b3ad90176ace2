//! K-step lookahead thresholding for non-episodic finite-horizon tabular MDPs.
//!
//! The crate contains exact planners ([`planning`]), online learners
//! ([`agents`]), benchmark environments ([`envs`]), evaluation quantities
//! ([`metrics`]) and a seeded experiment pipeline ([`harness`]).

pub mod agents;
pub mod envs;
pub mod error;
pub mod harness;
pub mod mdp;
pub mod metrics;
pub mod planning;
pub mod rng;

pub use error::{Error, Result};
pub use mdp::{RewardNoise, TabularMdp};
pub use rng::RngStream;
