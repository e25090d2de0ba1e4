//! Assignments of joint-action values, their feasibility (acyclicity and
//! clique density) and the minimal updated event times they induce.

mod digraph;
mod timing;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EdgeId, ProblemInstance};

pub use digraph::{check_feasible, induced_digraph, CliqueOverflow, FeasibilityReport, InducedDigraph};
pub use timing::{
    cost, evaluate, updated_times, EventKind, EventRef, EventTable, RobotTimeline, ScheduleResult,
    ScheduleSummary, Side, TimedEvent,
};

/// Value of one joint-action edge `{a, b}` (stored with `a < b`).
///
/// Exclusive: the waiting side may not enter before the prioritized side has
/// exited. Following: the follower may not enter before the leader entered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointValue {
    /// `a → b`
    AbExcl,
    /// `b → a`
    BaExcl,
    /// `a ≻ b`
    AbFollow,
    /// `b ≻ a`
    BaFollow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    AToB,
    BToA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Exclusive,
    Following,
}

impl JointValue {
    /// All values in the order `→, ←, ≻, ≺`.
    pub const ALL: [JointValue; 4] = [Self::AbExcl, Self::BaExcl, Self::AbFollow, Self::BaFollow];

    pub fn new(direction: Direction, kind: EdgeKind) -> Self {
        match (direction, kind) {
            (Direction::AToB, EdgeKind::Exclusive) => Self::AbExcl,
            (Direction::BToA, EdgeKind::Exclusive) => Self::BaExcl,
            (Direction::AToB, EdgeKind::Following) => Self::AbFollow,
            (Direction::BToA, EdgeKind::Following) => Self::BaFollow,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Self::AbExcl | Self::AbFollow => Direction::AToB,
            Self::BaExcl | Self::BaFollow => Direction::BToA,
        }
    }

    pub fn kind(self) -> EdgeKind {
        match self {
            Self::AbExcl | Self::BaExcl => EdgeKind::Exclusive,
            Self::AbFollow | Self::BaFollow => EdgeKind::Following,
        }
    }

    pub fn is_following(self) -> bool {
        self.kind() == EdgeKind::Following
    }

    pub fn reversed(self) -> Self {
        let d = match self.direction() {
            Direction::AToB => Direction::BToA,
            Direction::BToA => Direction::AToB,
        };
        Self::new(d, self.kind())
    }

    pub fn toggled(self) -> Self {
        let k = match self.kind() {
            EdgeKind::Exclusive => EdgeKind::Following,
            EdgeKind::Following => EdgeKind::Exclusive,
        };
        Self::new(self.direction(), k)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::AbExcl => "ab_excl",
            Self::BaExcl => "ba_excl",
            Self::AbFollow => "ab_follow",
            Self::BaFollow => "ba_follow",
        }
    }
}

impl fmt::Display for JointValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A total map from joint edge id to [`JointValue`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "AssignmentFile", into = "AssignmentFile")]
pub struct Assignment {
    values: Vec<JointValue>,
}

impl Assignment {
    pub fn new(values: Vec<JointValue>) -> Self {
        Self { values }
    }

    pub fn uniform(edges: usize, value: JointValue) -> Self {
        Self::new(vec![value; edges])
    }

    pub fn values(&self) -> &[JointValue] {
        &self.values
    }

    pub fn get(&self, edge: EdgeId) -> JointValue {
        self.values[edge.index()]
    }

    pub fn set(&mut self, edge: EdgeId, value: JointValue) {
        self.values[edge.index()] = value;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn following_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_following()).count()
    }

    /// Fails unless the assignment covers exactly the instance's edges.
    pub fn check_len(&self, instance: &ProblemInstance) -> Result<()> {
        if self.values.len() != instance.num_edges() {
            return Err(Error::IncompleteAssignment {
                expected: instance.num_edges(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentEntry {
    id: EdgeId,
    value: JointValue,
}

#[derive(Serialize, Deserialize)]
struct AssignmentFile {
    edges: Vec<AssignmentEntry>,
}

impl From<Assignment> for AssignmentFile {
    fn from(a: Assignment) -> Self {
        Self {
            edges: a
                .values
                .into_iter()
                .enumerate()
                .map(|(i, value)| AssignmentEntry { id: EdgeId(i), value })
                .collect(),
        }
    }
}

impl TryFrom<AssignmentFile> for Assignment {
    type Error = String;

    fn try_from(file: AssignmentFile) -> std::result::Result<Self, String> {
        let n = file.edges.len();
        let mut values = vec![None; n];
        for entry in file.edges {
            let slot = values
                .get_mut(entry.id.index())
                .ok_or_else(|| format!("edge id {} out of range for {n} entries", entry.id.0))?;
            if slot.replace(entry.value).is_some() {
                return Err(format!("edge id {} assigned twice", entry.id.0));
            }
        }
        Ok(Self::new(values.into_iter().map(|v| v.expect("ids are dense")).collect()))
    }
}

/// Cost functions over the updated completion times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Mean completion time.
    Avg,
    /// Latest completion time.
    Max,
    /// Mean completion plus mean absolute deviation from it.
    Sync,
    /// Mean over robots of the mean per-event delay.
    Delay,
}

impl Objective {
    pub const ALL: [Objective; 4] = [Self::Avg, Self::Max, Self::Sync, Self::Delay];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Avg => "avg",
            Self::Max => "max",
            Self::Sync => "sync",
            Self::Delay => "delay",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avg" => Ok(Self::Avg),
            "max" => Ok(Self::Max),
            "sync" => Ok(Self::Sync),
            "delay" => Ok(Self::Delay),
            other => Err(Error::InvalidParams(format!("unknown objective {other:?}"))),
        }
    }
}
