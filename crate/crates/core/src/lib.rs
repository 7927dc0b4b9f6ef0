//! Simulation of multi-objective bandits under lexicographic preferences.
//!
//! - [`lexcore`]: dominance, optimal and suboptimal sets, gaps.
//! - [`envs`]: reward-generating instances and seeded random streams.
//! - [`policies`]: OM-LEX, NOM-LEX and PF-LEX.
//! - [`regret`]: priority-based, priority-free and satisficing regret.
//! - [`bounds`]: closed-form regret bounds.
//! - [`harness`]: built-in settings, experiment configs, parallel runs and CSV export.

pub mod bounds;
pub mod envs;
pub mod error;
pub mod harness;
pub mod lexcore;
pub mod policies;
pub mod regret;

pub use error::{LexError, Result};
