//! LP decoding over memoryless symmetric binary-input channels, with tools
//! for studying how decoding behaves when the log-likelihood ratios carry a
//! uniform excess.

pub mod channel;
pub mod config;
pub mod error;
pub mod excess_lab;
pub mod linear_code;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod witness;

pub use channel::{DistortionCertificate, LlrVector, MsbChannel, SigmaPartition};
pub use error::{Error, Result};
pub use linear_code::{BitVector, ParityCheckMatrix, TannerGraph};
pub use polytope::{DecodeStatus, FundamentalPolytope, LpOutcome};
pub use rational::Rational;
pub use witness::{DualWitness, RepairOutcome, TrimReport};
pub use excess_lab::{ExcessCurve, MarkovBoundReport, MarkovVerdict, SuccessEstimate};
pub use config::ExperimentConfig;
