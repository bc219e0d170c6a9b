//! Simulation and algorithm library for anonymous dynamic networks.
//!
//! The crate models synchronous dynamic multigraph networks of anonymous
//! processes and implements the history-tree machinery that drives every
//! algorithm here: ground-truth tree construction, per-process views with
//! canonical forms, and the merge procedure each process runs every round.
//! On top of that sit the equation-based Concentration algorithms
//! (stabilizing and terminating, no leaders) and the Generalized Counting
//! algorithms for networks with a known number of leaders.

pub mod dot;
pub mod equations;
pub mod history;
pub mod leaderless;
pub mod leaders;
pub mod network;
pub mod sim;

pub use history::{HistoryTree, View};
pub use network::{InputAssignment, ProcessInput, RoundGraph, Schedule};
