use std::collections::HashMap;

use super::{EdgeId, InstanceData, NodeId, RobotId};

/// Adjacency indices derived once from a validated instance.
#[derive(Debug, Clone)]
pub struct Topology {
    robot_pos: HashMap<RobotId, usize>,
    node_robot: Vec<usize>,
    chains: Vec<Vec<NodeId>>,
    parent: Vec<Option<NodeId>>,
    node_edges: Vec<Vec<EdgeId>>,
    edge_cliques: Vec<Vec<usize>>,
    clique_edges: Vec<Vec<EdgeId>>,
}

impl Topology {
    pub(crate) fn new(data: &InstanceData) -> Self {
        let robot_pos: HashMap<RobotId, usize> = data
            .robots
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i))
            .collect();
        let node_robot: Vec<usize> = data.nodes.iter().map(|n| robot_pos[&n.robot]).collect();

        let mut chains = vec![Vec::new(); data.robots.len()];
        for node in &data.nodes {
            chains[robot_pos[&node.robot]].push(node.id);
        }
        for chain in &mut chains {
            chain.sort_by_key(|v| data.nodes[v.index()].seq_index);
        }
        let mut parent = vec![None; data.nodes.len()];
        for chain in &chains {
            for w in chain.windows(2) {
                parent[w[1].index()] = Some(w[0]);
            }
        }

        let mut node_edges = vec![Vec::new(); data.nodes.len()];
        for e in &data.joints {
            node_edges[e.a.index()].push(e.id);
            node_edges[e.b.index()].push(e.id);
        }

        let cliques = data.cliques.as_deref().unwrap_or(&[]);
        let mut edge_cliques = vec![Vec::new(); data.joints.len()];
        let mut clique_edges = vec![Vec::new(); cliques.len()];
        let mut in_clique = vec![false; data.nodes.len()];
        for (k, clique) in cliques.iter().enumerate() {
            for v in &clique.members {
                in_clique[v.index()] = true;
            }
            for v in &clique.members {
                for &e in &node_edges[v.index()] {
                    let edge = &data.joints[e.index()];
                    // count each edge once, from its `a` side
                    if edge.a == *v && in_clique[edge.b.index()] {
                        clique_edges[k].push(e);
                        edge_cliques[e.index()].push(k);
                    }
                }
            }
            for v in &clique.members {
                in_clique[v.index()] = false;
            }
        }
        for edges in &mut clique_edges {
            edges.sort_unstable();
        }

        Self {
            robot_pos,
            node_robot,
            chains,
            parent,
            node_edges,
            edge_cliques,
            clique_edges,
        }
    }

    /// Index of `robot` in the instance's robot list.
    pub fn robot_position(&self, robot: RobotId) -> Option<usize> {
        self.robot_pos.get(&robot).copied()
    }

    /// Robot position (index into the robot list) owning `node`.
    pub fn robot_of(&self, node: NodeId) -> usize {
        self.node_robot[node.index()]
    }

    /// Nodes of each robot in path order, indexed by robot position.
    pub fn chains(&self) -> &[Vec<NodeId>] {
        &self.chains
    }

    /// The precedence predecessor of `node`, if any.
    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node.index()]
    }

    pub fn edges_of(&self, node: NodeId) -> &[EdgeId] {
        &self.node_edges[node.index()]
    }

    /// Cliques (by index) containing both endpoints of `edge`.
    pub fn cliques_of(&self, edge: EdgeId) -> &[usize] {
        &self.edge_cliques[edge.index()]
    }

    /// Joint edges with both endpoints in clique `k`.
    pub fn clique_edges(&self, k: usize) -> &[EdgeId] {
        &self.clique_edges[k]
    }
}
