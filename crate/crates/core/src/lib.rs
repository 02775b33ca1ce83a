//! Finite-horizon laboratory for Gowers spaces.
//!
//! Build a [`SpaceInstance`] from an [`InstanceSpec`], play the six games on
//! it, solve clopen payoffs by backward induction, and run the strategy
//! transformations in [`reductions`] and [`approx`]. Every transformation
//! returns a strategy that can be checked with [`verify_strategy`].

pub mod approx;
pub mod error;
pub mod games;
pub mod instances;
pub mod payoff;
pub mod rat;
pub mod reductions;
pub mod scenario;
pub mod solver;
pub mod space;
pub mod strategy;

pub use error::{Error, Result};
pub use games::{apply_move, legal_moves, play_outcome, Game, GameKind, GamePosition, Move, MoveRecord, Player};
pub use instances::{build_instance, InstanceSpec};
pub use payoff::{Domain, Payoff};
pub use rat::{parse_rat, Rat};
pub use solver::{naive_solve_oracle, solve, SolveResult};
pub use space::{check_axioms, derive_relations, PointId, PointSet, SpaceInstance, SubspaceId};
pub use strategy::{verify_exhaustive, verify_strategy, Strategy, VerificationMode, VerificationReport, VerifiedStrategy};
