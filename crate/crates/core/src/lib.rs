//! Explicit multi-robot coordination on coordination graphs.
//!
//! Robots that interfere on shared path sections are modelled as a
//! coordination skeleton graph ([`model`]). An [`schedule::Assignment`]
//! picks a passing order and pattern for every interfering pair; it is
//! feasible when the induced digraph is acyclic and every maximal clique
//! respects its density budget. [`decoder`] turns positive node bids and
//! edge scores into assignments that are feasible by construction, and
//! [`solvers`] searches for low-cost assignments.

pub mod decoder;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod model;
pub mod schedule;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{EdgeId, NodeId, ProblemInstance, RobotId};
pub use schedule::{Assignment, JointValue, Objective};
