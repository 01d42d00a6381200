//! Multi-pursuer, single-evader reach-avoid games played as a sequence of
//! two-player zero-sum matrix games.
//!
//! The evader must reach a target disk while staying outside every pursuer's
//! capture disk. Each stage builds a payoff matrix — from capture-time
//! geometry, from a heading heuristic, or from a learned linear Q-function —
//! solves the induced zero-sum game exactly with a dense primal simplex, and
//! samples the players' mixed strategies. Training uses min-max Q-learning in
//! a 4-dimensional feature space that is invariant in the number of pursuers.

pub mod config;
pub mod engine;
pub mod error;
pub mod harness;
pub mod learning;
pub mod matrix_game;
mod simplex;
pub mod time_metrics;
pub mod vec2;

pub use engine::{EvaderAction, GameState, GameStatus, PursuerAction};
pub use error::{Error, Result};
pub use harness::{EpisodeRecord, ExperimentConfig, Method, PursuerPolicy, SummaryStats};
pub use learning::{FeatureVector, LearningState, TrainingConfig, TrainingLog, WeightVector};
pub use matrix_game::{GameSolution, MixedStrategy, PayoffMatrix};
pub use time_metrics::{KinematicParams, TimeToEvent};
pub use vec2::Vec2;
