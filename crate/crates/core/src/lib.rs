#![forbid(unsafe_code)]

//! Quantum-correlation bookkeeping for finite-dimensional systems.
//!
//! The crate computes how much of the mutual information between two
//! subsystems an interrogating observable on one side extracts, splits it into
//! information gain, discord, and residual correlations, coarsens observables
//! along a chain that separates redundant, essential, garbled, purely quantum,
//! and quasi-classical noise, classifies discord zeros, and verifies the
//! entropy bookkeeping of ideal premeasurements.
//!
//! All numerics are generic over the floating-point [`Scalar`]; the crate
//! root exposes `f64` aliases, which match the bundled tolerances.

pub mod error;
pub mod tol;
pub mod linalg;
pub mod scalar;
pub mod state;
pub mod info;
pub mod coarsen;
pub mod zero_discord;
pub mod measure;
pub mod gen;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use coarsen::{build_chain, chain_monotonicity_report, CoarseningChain, NoiseLedger};
pub use gen::{fixture_state, Fixture};
pub use info::{
    coherence_information, discord, mutual_info_decomposition, mutual_information,
    von_neumann_entropy, CoherenceMethod,
};
pub use measure::{premeasure, ApparatusSpec, PremeasurementResult};
pub use state::{BipartiteState, DensityMatrix, Observable, TripartiteState};
pub use zero_discord::{classify, DiscordClassification, ZeroDiscordKind};

/// `f64` working-precision aliases.
pub type Matrix64 = linalg::CMatrix<f64>;
pub type Matrix32 = linalg::CMatrix<f32>;
pub type DensityMatrix64 = state::DensityMatrix<f64>;
pub type Observable64 = state::Observable<f64>;
pub type BipartiteState64 = state::BipartiteState<f64>;
pub type TripartiteState64 = state::TripartiteState<f64>;
pub type Mixture64 = info::Mixture<f64>;
