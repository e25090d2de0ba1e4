use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::search::SearchGraph;
use super::{assignment_cost, SolveOutcome, SolveStats, SolverConfig};
use crate::decoder::{bids_from_dag, decode, BidSample, DEFAULT_EPSILON};
use crate::error::Result;
use crate::model::ProblemInstance;
use crate::schedule::{Assignment, Direction, EdgeKind, JointValue};

/// First-come-first-served orientation of every joint edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FcfsDirections {
    pub directions: Vec<Direction>,
    /// Edges whose FCFS direction had to be reversed to avoid a cycle.
    pub repaired: Vec<usize>,
}

/// The robot that reaches the shared section first goes first (ties to
/// `a`). Edges are committed in order of their earliest entry time; an edge
/// whose FCFS direction would close a cycle is reversed instead.
pub fn fcfs_directions(instance: &ProblemInstance) -> FcfsDirections {
    let joints = instance.joints();
    let mut order: Vec<usize> = (0..joints.len()).collect();
    order.sort_by(|&x, &y| {
        let first = |e: usize| joints[e].enter_ab.min(joints[e].enter_ba);
        first(x).total_cmp(&first(y)).then(x.cmp(&y))
    });

    let mut graph = SearchGraph::new(instance);
    let mut directions = vec![Direction::AToB; joints.len()];
    let mut repaired = Vec::new();
    for e in order {
        let j = &joints[e];
        let (a, b) = (j.a.index(), j.b.index());
        let wanted = if j.enter_ab <= j.enter_ba {
            Direction::AToB
        } else {
            Direction::BToA
        };
        let (from, to) = match wanted {
            Direction::AToB => (a, b),
            Direction::BToA => (b, a),
        };
        let direction = if graph.reaches(to, from, None) {
            repaired.push(e);
            match wanted {
                Direction::AToB => Direction::BToA,
                Direction::BToA => Direction::AToB,
            }
        } else {
            wanted
        };
        match direction {
            Direction::AToB => graph.push_arc(a, b, e),
            Direction::BToA => graph.push_arc(b, a, e),
        }
        directions[e] = direction;
    }
    repaired.sort_unstable();
    FcfsDirections {
        directions,
        repaired,
    }
}

/// FCFS directions realised as bids, with edge types from seeded random
/// scores.
pub(crate) fn fcfs_assignment(instance: &ProblemInstance, seed: u64) -> Result<Assignment> {
    let fcfs = fcfs_directions(instance);
    let target = Assignment::new(
        fcfs.directions
            .iter()
            .map(|&d| JointValue::new(d, EdgeKind::Exclusive))
            .collect(),
    );
    let bids = bids_from_dag(instance, &target, DEFAULT_EPSILON)?.bids;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores = (0..instance.num_edges()).map(|_| rng.random::<f64>()).collect();
    decode(instance, &BidSample::new(bids, scores))
}

pub fn solve_fcfs(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    let deadline = config.deadline();
    let best = fcfs_assignment(instance, config.seed)?;
    let cost = assignment_cost(instance, &best, config.objective)?;
    Ok(SolveOutcome {
        best,
        cost,
        top: Vec::new(),
        stats: SolveStats {
            expanded: 1,
            evaluations: 1,
            wall_time_s: deadline.elapsed(),
            incomplete: false,
        },
    })
}
