//! Time-symmetric quantum counterfactual probabilities for pre- and
//! post-selected systems.
//!
//! The crate pairs four analytic conditional-probability rules (predictive
//! Born, retrodictive Born, the time-symmetric ABL rule, and Kastner's rival
//! rule) with an independent Monte Carlo oracle that estimates the same
//! quantities by literally simulating runs and discarding those that fail
//! the selection criteria. Canned experiments (the three-holes setup, the
//! quantum raffle) and a randomized scenario generator drive the
//! verification suite.

pub mod ensemble;
pub mod error;
pub mod hilbert;
pub mod report;
pub mod rng;
pub mod rules;
pub mod scenario_file;
pub mod scenarios;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
