//! Best-response opinion dynamics on a discrete opinion grid, where each
//! agent balances agreement with weighted neighbours against a media
//! recommendation that pushes moderate opinions to `0` and others to `±1`.
//!
//! The crate covers the simulation engine ([`Game`]), the closed-form theory
//! of the symmetric two-block model ([`theory`]), graph generators and
//! partitioning ([`graphgen`]), Monte-Carlo experiments ([`harness`]), the
//! exponential-length lower-bound construction ([`gadget`]) and a config
//! driven command line front end ([`cli`]).

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod graphgen;
pub mod grid;
pub mod harness;
pub mod model;
pub mod theory;

pub use dynamics::{
    AsyncOptions, AsyncRun, Mover, OutcomeKind, ScheduledRun, Snapshot, SyncRun, Trajectory,
    UpdateOutcome,
};
pub use error::{Error, Result};
pub use graph::{Edge, SocialGraph};
pub use grid::{GridOpinion, OpinionGrid, Recommendation};
pub use model::{Cost, Game, ModelParams, OpinionProfile};
