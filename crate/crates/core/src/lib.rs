//! Analytic error and cost models for small-angle logical rotation gates.
//!
//! The crate is organised bottom-up:
//!
//! - [`zchan`]: exact algebra for channels that are convex mixtures of
//!   single-qubit Z rotations, plus a 2x2 density-matrix oracle.
//! - [`tmr`]: output model of transversal multi-rotation resource-state
//!   preparation (logical angle, error branches, supply time).
//! - [`pcec`]: probabilistic coherent-error cancellation and the residual
//!   stochastic-Z rate left after it.
//! - [`smm`]: the analog/digital repeat-until-success engine, with analytic
//!   expectations, exact trajectory enumeration and a seeded Monte-Carlo
//!   sampler.
//! - [`mitigation`]: probabilistic-error-cancellation budgets and feasible
//!   circuit-size boundaries for four architectures.
//! - [`tepai`]: TE-PAI gate counts and end-to-end surface-code resource
//!   estimates.
//! - [`hamcat`]: L1-norm catalog and a Jordan-Wigner Hubbard generator.
//!
//! All angles are in radians and follow the convention `R(θ) = exp(iθZ)`.

pub mod error;
pub mod hamcat;
pub mod mitigation;
pub mod pcec;
pub mod smm;
pub mod tepai;
pub mod tmr;
pub mod zchan;

pub use error::{Error, Result};
pub use hamcat::{Boundary, PauliOp, PauliTerm, SystemEntry, SystemKind};
pub use mitigation::{AlphaModel, Architecture, ArchitectureConstants, CircuitProfile, MitigationBudget};
pub use smm::{DeltaPolicy, SmmConfig, SmmReport, SwitchPathAccounting, ThresholdPolicy};
pub use tepai::{TepaiEstimate, TepaiInstance};
pub use tmr::{TmrOutputModel, TmrParams};
pub use zchan::{DensityMatrix2, RotationMixture};
