//! Constraint-preserving decoding of continuous parameters into assignments.
//!
//! Each node carries a positive bid; its rank is its bid plus the bids of
//! all its precedence ancestors, so ranks strictly increase along every
//! robot chain. Orienting each joint edge from lower to higher rank then
//! yields an acyclic digraph that contains all precedence arcs. Following
//! edges are picked greedily by score, admitted only while every clique
//! containing the edge has budget left. Any positive bids and any scores
//! therefore decode to a feasible assignment, and [`bids_from_dag`] shows
//! every feasible orientation is reachable.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EdgeId, NodeId, ProblemInstance};
use crate::schedule::{check_feasible, induced_digraph, Assignment, Direction, EdgeKind, JointValue};

/// Margin used by [`bids_from_dag`] between a node's rank and the largest
/// rank among its predecessors.
pub const DEFAULT_EPSILON: f64 = 1.0;

/// Positive node bids plus real-valued following propensities per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidSample {
    pub bids: Vec<f64>,
    pub scores: Vec<f64>,
}

impl BidSample {
    pub fn new(bids: Vec<f64>, scores: Vec<f64>) -> Self {
        Self { bids, scores }
    }

    pub fn check_dims(&self, instance: &ProblemInstance) -> Result<()> {
        if self.bids.len() != instance.num_nodes() || self.scores.len() != instance.num_edges() {
            return Err(Error::DimensionMismatch {
                expected_nodes: instance.num_nodes(),
                expected_edges: instance.num_edges(),
                nodes: self.bids.len(),
                edges: self.scores.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
}

impl RankVector {
    pub fn values(&self) -> &[f64] {
        &self.ranks
    }

    pub fn get(&self, node: NodeId) -> f64 {
        self.ranks[node.index()]
    }
}

/// Rank of every node: its bid plus the bids of its precedence ancestors.
pub fn ranks_from_bids(instance: &ProblemInstance, bids: &[f64]) -> Result<RankVector> {
    if bids.len() != instance.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected_nodes: instance.num_nodes(),
            expected_edges: instance.num_edges(),
            nodes: bids.len(),
            edges: instance.num_edges(),
        });
    }
    if let Some((node, &value)) = bids.iter().enumerate().find(|(_, b)| !(**b > 0.0 && b.is_finite())) {
        return Err(Error::NonPositiveBid { node, value });
    }
    let mut ranks = vec![0.0; bids.len()];
    for chain in instance.topology().chains() {
        let mut acc = 0.0;
        for v in chain {
            acc += bids[v.index()];
            ranks[v.index()] = acc;
        }
    }
    Ok(RankVector { ranks })
}

/// Directs every joint edge from the lower-ranked endpoint to the higher;
/// equal ranks go from the lower node id.
pub fn orient(instance: &ProblemInstance, ranks: &RankVector) -> Vec<Direction> {
    instance
        .joints()
        .iter()
        .map(|e| {
            let (ra, rb) = (ranks.get(e.a), ranks.get(e.b));
            if ra < rb || (ra == rb && e.a < e.b) {
                Direction::AToB
            } else {
                Direction::BToA
            }
        })
        .collect()
}

/// Marks edges as following in descending score order (ties by edge id)
/// while every clique containing the edge still has budget left.
pub fn select_following(instance: &ProblemInstance, scores: &[f64]) -> Vec<EdgeKind> {
    assert_eq!(scores.len(), instance.num_edges(), "one score per joint edge");
    let topo = instance.topology();
    let mut remaining: Vec<u32> = instance.cliques().iter().map(|c| c.budget).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&x, &y| scores[y].total_cmp(&scores[x]).then(x.cmp(&y)));

    let mut kinds = vec![EdgeKind::Exclusive; scores.len()];
    for e in order {
        let cliques = topo.cliques_of(EdgeId(e));
        if cliques.iter().all(|&k| remaining[k] > 0) {
            for &k in cliques {
                remaining[k] -= 1;
            }
            kinds[e] = EdgeKind::Following;
        }
    }
    kinds
}

/// Decodes a sample into an assignment that always passes
/// [`check_feasible`].
pub fn decode(instance: &ProblemInstance, sample: &BidSample) -> Result<Assignment> {
    sample.check_dims(instance)?;
    let ranks = ranks_from_bids(instance, &sample.bids)?;
    let directions = orient(instance, &ranks);
    let kinds = select_following(instance, &sample.scores);
    Ok(Assignment::new(
        directions
            .into_iter()
            .zip(kinds)
            .map(|(d, k)| JointValue::new(d, k))
            .collect(),
    ))
}

/// Constructs a sample that decodes to `target`'s edge directions.
///
/// Nodes are visited in a topological order of the target digraph. Each
/// bid is chosen so the node's rank exceeds the rank of every predecessor
/// by at least `epsilon`. Scores are 1 on the target's following edges and
/// 0 elsewhere, so re-decoding reproduces the edge types whenever the
/// budgets leave no room for extra following edges.
pub fn bids_from_dag(instance: &ProblemInstance, target: &Assignment, epsilon: f64) -> Result<BidSample> {
    target.check_len(instance)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let report = check_feasible(instance, target);
    if !report.is_feasible() {
        return Err(Error::Infeasible(report.describe()));
    }
    let graph = induced_digraph(instance, target);
    let order = graph
        .topological_order()
        .expect("feasible assignments induce a DAG");
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); instance.num_nodes()];
    for (u, v) in graph.arcs() {
        preds[v.index()].push(u);
    }

    let topo = instance.topology();
    let mut bids = vec![0.0; instance.num_nodes()];
    let mut ranks = vec![0.0; instance.num_nodes()];
    for v in order {
        // sum of ancestor bids is the parent's rank on a chain
        let ancestors = topo.parent(v).map_or(0.0, |p| ranks[p.index()]);
        let highest = preds[v.index()]
            .iter()
            .map(|u| ranks[u.index()])
            .fold(f64::NEG_INFINITY, f64::max);
        let bid = (highest - ancestors).max(0.0) + epsilon;
        bids[v.index()] = bid;
        ranks[v.index()] = ancestors + bid;
    }

    let scores = target
        .values()
        .iter()
        .map(|v| if v.is_following() { 1.0 } else { 0.0 })
        .collect();
    Ok(BidSample { bids, scores })
}

/// One line of a sample file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub instance: u64,
    pub bids: Vec<f64>,
    pub scores: Vec<f64>,
}

impl SampleRecord {
    pub fn sample(&self) -> BidSample {
        BidSample::new(self.bids.clone(), self.scores.clone())
    }
}

/// Reads a JSON Lines sample file; blank lines are skipped.
pub fn read_samples(path: impl AsRef<Path>) -> Result<Vec<SampleRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            record: out.len(),
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_samples(path: impl AsRef<Path>, samples: &[SampleRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for s in samples {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
