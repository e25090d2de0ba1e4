use super::search::PartialAssignment;
use super::{default_assignment, assignment_cost, SolveOutcome, SolveStats, SolverConfig};
use crate::error::Result;
use crate::model::{EdgeId, ProblemInstance};
use crate::schedule::{Assignment, JointValue};

/// Bounded backtracking: depth-first over edges in id order and values in
/// `→, ←, ≻, ≺` order, pruning only infeasible partial assignments. The
/// first `bbts_candidates` complete assignments are scored and the
/// cheapest is returned.
pub fn solve_bbts(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    let deadline = config.deadline();
    let mut walk = Walk {
        partial: PartialAssignment::new(instance),
        found: Vec::new(),
        limit: config.bbts_candidates,
        stats: SolveStats::default(),
        deadline,
        m: instance.num_edges(),
    };
    walk.descend(0);

    let mut stats = walk.stats;
    if walk.found.is_empty() {
        walk.found.push(default_assignment(instance)?);
    }
    let mut best: Option<(Assignment, f64)> = None;
    for assignment in walk.found {
        let cost = assignment_cost(instance, &assignment, config.objective)?;
        stats.evaluations += 1;
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((assignment, cost));
        }
    }
    let (best, cost) = best.expect("non-empty");
    stats.wall_time_s = deadline.elapsed();
    Ok(SolveOutcome {
        best,
        cost,
        top: Vec::new(),
        stats,
    })
}

struct Walk<'a> {
    partial: PartialAssignment<'a>,
    found: Vec<Assignment>,
    limit: usize,
    stats: SolveStats,
    deadline: super::Deadline,
    m: usize,
}

impl Walk<'_> {
    fn done(&self) -> bool {
        self.found.len() >= self.limit || self.stats.incomplete
    }

    fn descend(&mut self, depth: usize) {
        self.stats.expanded += 1;
        if self.stats.expanded % 256 == 0 && self.deadline.expired() {
            self.stats.incomplete = true;
        }
        if self.done() {
            return;
        }
        if depth == self.m {
            self.found.push(Assignment::new(
                self.partial.values().iter().map(|v| v.expect("complete")).collect(),
            ));
            return;
        }
        let edge = EdgeId(depth);
        for value in JointValue::ALL {
            if !self.partial.admissible(edge, value) {
                continue;
            }
            self.partial.assign(edge, value);
            self.descend(depth + 1);
            self.partial.unassign(edge);
            if self.done() {
                return;
            }
        }
    }
}
