//! Sparse-system identification under impulsive noise.
//!
//! The crate builds recursive least-squares estimators around three
//! cooperating mechanisms: an M-estimator that gates impulsive samples out
//! of the update, a log-penalty correction that shrinks inactive
//! coefficients of a sparse system, and online adaptation of both the
//! forgetting factor and the sparsity weight. Signal and noise generators
//! plus a seeded Monte-Carlo harness reproduce NMSD learning-curve
//! experiments end to end.

pub mod algorithms;
pub mod config;
pub mod error;
pub mod filter;
pub mod harness;
pub mod robust;
pub mod signal;
pub mod sparsity;
pub mod vff;

pub use algorithms::{AdaptiveFilter, AlgorithmSpec, Variant};
pub use config::{AlgorithmEntry, CaseKind, ExperimentConfig, NoiseKind};
pub use error::{Error, Result};
pub use filter::{FilterState, Regressor, StepDiagnostics};
pub use harness::{NmsdCurve, RunData};
pub use robust::{MEstimatorParams, ResetDetectorState, ResetParams, RobustScaleState};
pub use signal::{Ar2State, NoiseModel, SparseSystem};
pub use sparsity::RhoSchedule;
pub use vff::{VffParams, VffState};
