//! Finite modules over R = A[C_p], with A the unramified extension of Z_p of
//! degree d, truncated at p^N.
//!
//! The crate computes #M, the Fitting ideal and its index, the base change
//! M~ to the normalization of R and the auxiliary modules K and H, and checks
//! the inequality #M ≤ #R/Fit_R(M) together with the identities around it.

pub mod coeff;
pub mod decomp;
pub mod error;
pub mod groupring;
pub mod harness;
pub mod linalg;
pub mod modpres;
pub mod normalization;
pub mod ring;

pub use coeff::{ArithOp, CoeffElem, RingConfig, RingSpec};
pub use decomp::{AbelianGroup, DecompFactor, FactorSides};
pub use error::{Error, Result};
pub use groupring::{GroupRing, GroupRingElem, RIdeal};
pub use harness::{CampaignConfig, CampaignSummary, Precision, ValueSet};
pub use linalg::{Lattice, Matrix};
pub use modpres::{Flags, ModuleReport, PidPresentation, Presentation};
pub use normalization::{TildeElem, TildeLattice, TildeRing};
