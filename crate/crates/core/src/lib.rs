//! Numerical toolkit for reversible manipulation of magic states in odd
//! dimensions.
//!
//! The crate provides:
//!
//! - discrete phase-space machinery: Heisenberg-Weyl operators, phase-point
//!   operators, Wigner representations of states and channels
//!   ([`phase_space`], [`wigner`]);
//! - the mana monotone and exact-transformation feasibility under
//!   positive-Wigner-preserving operations, with both a constructive map
//!   builder and an independent linear-programming oracle ([`transform`]);
//! - the physical-implementability program: an SDP computing the minimal
//!   simulation overhead `nu` of a transformation at error tolerance `eps`,
//!   plus the associated sampling-cost estimate ([`implementability`]);
//! - channel utilities (Choi matrices, classification, reconstruction from
//!   stochastic Wigner matrices) and seeded random generators
//!   ([`channels`], [`random`]).
//!
//! All phase-space constructions require odd local dimensions of at least 3.

pub mod channels;
pub mod error;
pub mod implementability;
pub mod matrix;
pub mod phase_space;
pub mod random;
pub mod solver;
pub mod states;
pub mod transform;
pub mod wigner;

pub use channels::{apply_choi, classify, map_from_wigner, MapClass};
pub use error::{Error, Result};
pub use matrix::{CMat, DimSpec};
pub use implementability::{
    build_sdp, feasibility_threshold, minimal_error, physical_implementability,
    sampling_cost, solve_sdp, SdpOutcome, SdpStatus,
};
pub use phase_space::{PhasePoint, PhaseSpaceBasis};
pub use states::{named_state, parse_state, read_state_file, StateName};
pub use transform::{
    asymptotic_rate, can_transform, construct_stochastic_map, lp_feasibility_oracle,
    plan_transform, TransformPlan,
};
pub use wigner::{
    apply_stochastic, mana, operator_from_wigner, wigner_of_map, wigner_of_operator,
    ChoiMatrix, StochasticWignerMatrix, WignerVector,
};
