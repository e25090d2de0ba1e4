use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen::{gen_instance_indexed, GenParams};
use crate::error::{Error, Result};
use crate::model::{EdgeId, InstanceData, JointEdge, NodeId, ProblemInstance, RobotId};

/// Disjoint union of `parts` plus `extra_edges` random joint edges between
/// nodes of different parts.
///
/// Robots are renumbered `0..N` in part order and node/edge ids are
/// re-based. Each extra edge gets pairwise times sampled inside the hulls
/// of its two nodes. Cliques are recomputed from scratch.
pub fn stitch(parts: &[ProblemInstance], extra_edges: usize, seed: u64) -> Result<ProblemInstance> {
    if parts.len() < 2 {
        return Err(Error::InvalidParams(format!(
            "stitching needs at least 2 instances, got {}",
            parts.len()
        )));
    }
    let mut data = InstanceData {
        robots: Vec::new(),
        nodes: Vec::new(),
        precedence: Vec::new(),
        joints: Vec::new(),
        cliques: None,
    };
    // node id range of each part
    let mut ranges = Vec::with_capacity(parts.len());
    for part in parts {
        let node_base = data.nodes.len();
        let robot_base = data.robots.len() as u64;
        let robot_map = |r: RobotId| {
            let pos = part.topology().robot_position(r).expect("known robot");
            RobotId(robot_base + pos as u64)
        };
        data.robots.extend((0..part.robots().len()).map(|k| RobotId(robot_base + k as u64)));
        for node in part.nodes() {
            let mut node = node.clone();
            node.id = NodeId(node.id.index() + node_base);
            node.robot = robot_map(node.robot);
            data.nodes.push(node);
        }
        data.precedence.extend(
            part.precedence()
                .iter()
                .map(|&(u, v)| (NodeId(u.index() + node_base), NodeId(v.index() + node_base))),
        );
        for edge in part.joints() {
            let mut edge = edge.clone();
            edge.id = EdgeId(data.joints.len());
            edge.a = NodeId(edge.a.index() + node_base);
            edge.b = NodeId(edge.b.index() + node_base);
            data.joints.push(edge);
        }
        ranges.push(node_base..data.nodes.len());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: HashSet<(usize, usize)> = data.joints.iter().map(|e| (e.a.index(), e.b.index())).collect();
    let candidates: usize = {
        let total: usize = ranges.iter().map(|r| r.len()).sum();
        ranges.iter().map(|r| r.len() * (total - r.len())).sum::<usize>() / 2
    };
    if extra_edges > candidates {
        return Err(Error::InvalidParams(format!(
            "{extra_edges} extra edges requested but only {candidates} cross-part node pairs exist"
        )));
    }
    let mut added = 0;
    while added < extra_edges {
        let p = rng.random_range(0..parts.len());
        let q = (p + 1 + rng.random_range(0..parts.len() - 1)) % parts.len();
        if ranges[p].is_empty() || ranges[q].is_empty() {
            continue;
        }
        let u = rng.random_range(ranges[p].clone());
        let v = rng.random_range(ranges[q].clone());
        let (a, b) = (u.min(v), u.max(v));
        if !present.insert((a, b)) {
            continue;
        }
        let window = |rng: &mut ChaCha8Rng, node: usize| {
            let (lo, hi) = (data.nodes[node].enter, data.nodes[node].exit);
            let mut x = rng.random_range(lo..=hi);
            let mut y = rng.random_range(lo..=hi);
            if x > y {
                std::mem::swap(&mut x, &mut y);
            }
            if x == y {
                (lo, hi)
            } else {
                (x, y)
            }
        };
        let (enter_ab, exit_ab) = window(&mut rng, a);
        let (enter_ba, exit_ba) = window(&mut rng, b);
        data.joints.push(JointEdge {
            id: EdgeId(data.joints.len()),
            a: NodeId(a),
            b: NodeId(b),
            enter_ab,
            exit_ab,
            enter_ba,
            exit_ba,
        });
        added += 1;
    }
    ProblemInstance::new(data)
}

/// Stitches `parts` freshly generated instances (streams `0..parts` of
/// `params.seed`) with `extra_edges` cross edges.
pub fn gen_stitched(params: &GenParams, parts: usize, extra_edges: usize) -> Result<ProblemInstance> {
    let subs = (0..parts as u64)
        .map(|k| gen_instance_indexed(params, k))
        .collect::<Result<Vec<_>>>()?;
    stitch(&subs, extra_edges, params.seed)
}
