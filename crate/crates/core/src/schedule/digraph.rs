use serde::{Deserialize, Serialize};

use super::{Assignment, Direction};
use crate::model::{NodeId, ProblemInstance};

/// Directed graph over instance nodes: precedence arcs plus every joint
/// edge oriented from the prioritized node to the waiting one.
#[derive(Debug, Clone)]
pub struct InducedDigraph {
    succ: Vec<Vec<NodeId>>,
}

impl InducedDigraph {
    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v.index()]
    }

    pub fn num_nodes(&self) -> usize {
        self.succ.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (NodeId(u), v)))
    }

    /// Kahn's algorithm; `Err` carries the nodes left with positive
    /// in-degree when the graph has a cycle.
    pub fn topological_order(&self) -> Result<Vec<NodeId>, Vec<bool>> {
        let n = self.succ.len();
        let mut indeg = vec![0usize; n];
        for vs in &self.succ {
            for v in vs {
                indeg[v.index()] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = stack.pop() {
            order.push(NodeId(u));
            for v in &self.succ[u] {
                indeg[v.index()] -= 1;
                if indeg[v.index()] == 0 {
                    stack.push(v.index());
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(indeg.into_iter().map(|d| d > 0).collect())
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// A directed cycle, listed in arc order and rotated to start at its
    /// smallest node id.
    pub fn find_cycle(&self) -> Option<Vec<NodeId>> {
        let remaining = self.topological_order().err()?;
        // every remaining node has a remaining predecessor; walk backwards
        let n = self.succ.len();
        let mut pred = vec![None; n];
        for (u, vs) in self.succ.iter().enumerate() {
            if !remaining[u] {
                continue;
            }
            for v in vs {
                if remaining[v.index()] && pred[v.index()].is_none() {
                    pred[v.index()] = Some(u);
                }
            }
        }
        let start = remaining.iter().position(|&r| r)?;
        let mut pos = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = start;
        while pos[v] == usize::MAX {
            pos[v] = walk.len();
            walk.push(v);
            v = pred[v].expect("remaining nodes have a remaining predecessor");
        }
        let mut cycle: Vec<NodeId> = walk[pos[v]..].iter().rev().map(|&u| NodeId(u)).collect();
        let min_at = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| **v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        cycle.rotate_left(min_at);
        Some(cycle)
    }
}

/// Builds the digraph induced by `assignment` on the skeleton graph.
pub fn induced_digraph(instance: &ProblemInstance, assignment: &Assignment) -> InducedDigraph {
    assert_eq!(
        assignment.len(),
        instance.num_edges(),
        "assignment must cover every joint edge"
    );
    let mut succ = vec![Vec::new(); instance.num_nodes()];
    for &(u, v) in instance.precedence() {
        succ[u.index()].push(v);
    }
    for (edge, value) in instance.joints().iter().zip(assignment.values()) {
        match value.direction() {
            Direction::AToB => succ[edge.a.index()].push(edge.b),
            Direction::BToA => succ[edge.b.index()].push(edge.a),
        }
    }
    InducedDigraph { succ }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueOverflow {
    pub clique: usize,
    pub count: u32,
    pub budget: u32,
}

/// First witness of each kind of constraint violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub cycle: Option<Vec<NodeId>>,
    pub clique: Option<CliqueOverflow>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.cycle.is_none() && self.clique.is_none()
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(cycle) = &self.cycle {
            let names: Vec<String> = cycle.iter().map(ToString::to_string).collect();
            parts.push(format!("cycle {}", names.join(" -> ")));
        }
        if let Some(o) = &self.clique {
            parts.push(format!(
                "clique {} has {} following edges (budget {})",
                o.clique, o.count, o.budget
            ));
        }
        if parts.is_empty() {
            "feasible".into()
        } else {
            parts.join("; ")
        }
    }
}

/// Checks acyclicity of the induced digraph and every clique's
/// following-edge budget.
pub fn check_feasible(instance: &ProblemInstance, assignment: &Assignment) -> FeasibilityReport {
    let cycle = induced_digraph(instance, assignment).find_cycle();
    let topo = instance.topology();
    let clique = instance
        .cliques()
        .iter()
        .enumerate()
        .find_map(|(k, c)| {
            let count = topo
                .clique_edges(k)
                .iter()
                .filter(|&&e| assignment.get(e).is_following())
                .count() as u32;
            (count > c.budget).then_some(CliqueOverflow {
                clique: k,
                count,
                budget: c.budget,
            })
        });
    FeasibilityReport { cycle, clique }
}
