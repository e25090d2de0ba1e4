//! Coordination skeleton graphs: merged interference nodes, per-robot
//! precedence chains, undirected joint-action edges and the density
//! constraints attached to the maximal cliques of the joint graph.

mod cliques;
mod merge;
mod topology;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::EventTable;

pub use cliques::maximal_cliques;
pub use merge::merge_intervals;
pub use topology::Topology;
pub use validate::{validate, Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobotId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A pair of interfering intervals on two robot paths, expressed in
/// expected travel time (seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalPair {
    pub robot_a: RobotId,
    pub robot_b: RobotId,
    pub enter_a: f64,
    pub exit_a: f64,
    pub enter_b: f64,
    pub exit_b: f64,
}

impl IntervalPair {
    pub fn new(robot_a: RobotId, a: (f64, f64), robot_b: RobotId, b: (f64, f64)) -> Self {
        Self {
            robot_a,
            robot_b,
            enter_a: a.0,
            exit_a: a.1,
            enter_b: b.0,
            exit_b: b.1,
        }
    }

    /// The same pair with the roles of the two robots exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            robot_a: self.robot_b,
            robot_b: self.robot_a,
            enter_a: self.enter_b,
            exit_a: self.exit_b,
            enter_b: self.enter_a,
            exit_b: self.exit_a,
        }
    }
}

/// A merged interfering section on one robot's path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub robot: RobotId,
    /// Position of this section along the robot's path, starting at 0.
    pub seq_index: usize,
    pub enter: f64,
    pub exit: f64,
    pub density: u32,
}

/// An undirected joint-action edge between sections of two different
/// robots. Stored canonically with `a < b`; the times are the per-pair
/// expected enter/exit times of each side, which may be tighter than the
/// merged node hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEdge {
    pub id: EdgeId,
    pub a: NodeId,
    pub b: NodeId,
    pub enter_ab: f64,
    pub exit_ab: f64,
    pub enter_ba: f64,
    pub exit_ba: f64,
}

impl JointEdge {
    pub fn touches(&self, node: NodeId) -> bool {
        self.a == node || self.b == node
    }
}

/// A maximal clique of the joint graph with its following-edge budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub members: Vec<NodeId>,
    pub budget: u32,
    pub density: u32,
}

/// Largest number of following edges a clique of density `rho` may hold:
/// letting `rho + 1` robots in at once needs `(rho + 1) rho / 2` of them.
pub fn density_budget(rho: u32) -> u32 {
    ((rho + 1) * rho / 2).saturating_sub(1)
}

/// Serialized form of an instance. Nothing here is checked; use
/// [`ProblemInstance::new`] to validate and index it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub robots: Vec<RobotId>,
    pub nodes: Vec<Node>,
    pub precedence: Vec<(NodeId, NodeId)>,
    pub joints: Vec<JointEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliques: Option<Vec<Clique>>,
}

/// A validated coordination problem. Immutable once built.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "InstanceData", into = "InstanceData")]
pub struct ProblemInstance {
    data: InstanceData,
    topology: Topology,
    events: EventTable,
}

impl ProblemInstance {
    /// Validates `data` and builds the derived indices. Missing cliques are
    /// recomputed; supplied ones must equal the maximal cliques.
    pub fn new(mut data: InstanceData) -> Result<Self> {
        if data.cliques.is_none() {
            data.cliques = Some(maximal_cliques(&data));
        }
        let violations = validate(&data);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let topology = Topology::new(&data);
        let events = EventTable::new(&data, &topology);
        Ok(Self {
            data,
            topology,
            events,
        })
    }

    /// Merges raw interval pairs and builds the instance; every node gets
    /// `density`.
    pub fn from_pairs(pairs: &[IntervalPair], density: u32) -> Result<Self> {
        Self::new(merge_intervals(pairs, density)?)
    }

    /// Rebuilds the instance with new per-node densities (cliques and
    /// budgets are re-derived).
    pub fn with_densities(&self, densities: &[u32]) -> Result<Self> {
        let mut data = self.data.clone();
        for (node, &rho) in data.nodes.iter_mut().zip(densities) {
            node.density = rho;
        }
        data.cliques = None;
        Self::new(data)
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn robots(&self) -> &[RobotId] {
        &self.data.robots
    }

    pub fn nodes(&self) -> &[Node] {
        &self.data.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.data.nodes[id.0]
    }

    pub fn precedence(&self) -> &[(NodeId, NodeId)] {
        &self.data.precedence
    }

    pub fn joints(&self) -> &[JointEdge] {
        &self.data.joints
    }

    pub fn joint(&self, id: EdgeId) -> &JointEdge {
        &self.data.joints[id.0]
    }

    pub fn cliques(&self) -> &[Clique] {
        self.data.cliques.as_deref().unwrap_or(&[])
    }

    pub fn num_nodes(&self) -> usize {
        self.data.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.data.joints.len()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn events(&self) -> &EventTable {
        &self.events
    }
}

impl TryFrom<InstanceData> for ProblemInstance {
    type Error = Error;

    fn try_from(data: InstanceData) -> Result<Self> {
        Self::new(data)
    }
}

impl From<ProblemInstance> for InstanceData {
    fn from(instance: ProblemInstance) -> Self {
        instance.data
    }
}

impl PartialEq for ProblemInstance {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// r1:[2,4] interfering with r2:[3,5], uniform density `rho`.
    pub fn two_robot(rho: u32) -> ProblemInstance {
        let pair = IntervalPair::new(RobotId(1), (2.0, 4.0), RobotId(2), (3.0, 5.0));
        ProblemInstance::from_pairs(&[pair], rho).unwrap()
    }

    /// Three robots whose single sections pairwise interfere.
    pub fn triangle(rho: u32) -> ProblemInstance {
        let pairs = [
            IntervalPair::new(RobotId(0), (1.0, 3.0), RobotId(1), (2.0, 4.0)),
            IntervalPair::new(RobotId(1), (2.5, 4.5), RobotId(2), (3.0, 5.0)),
            IntervalPair::new(RobotId(0), (1.5, 3.5), RobotId(2), (3.5, 6.0)),
        ];
        ProblemInstance::from_pairs(&pairs, rho).unwrap()
    }
}
