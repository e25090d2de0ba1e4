use std::cmp::Reverse;

use super::search::PartialAssignment;
use super::{default_assignment, assignment_cost, RankedAssignment, SolveOutcome, SolveStats, SolverConfig};
use crate::error::Result;
use crate::model::{EdgeId, ProblemInstance};
use crate::schedule::{Assignment, JointValue, Objective};

/// Depth-first branch and bound over the four values of each edge.
///
/// Keeps the `top_l` cheapest complete assignments. A subtree is pruned
/// when its partial-schedule lower bound cannot beat the worst kept cost.
/// On timeout the best assignment found so far is returned and the stats
/// are marked incomplete.
pub fn solve_exact(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    let mut search = BranchAndBound {
        instance,
        objective: config.objective,
        top_l: config.top_l,
        order: edge_order(instance),
        partial: PartialAssignment::new(instance),
        top: Vec::new(),
        stats: SolveStats::default(),
        deadline: config.deadline(),
    };
    search.descend(0)?;

    let mut stats = search.stats;
    stats.wall_time_s = search.deadline.elapsed();
    let mut top = search.top;
    if top.is_empty() {
        let assignment = default_assignment(instance)?;
        let cost = assignment_cost(instance, &assignment, config.objective)?;
        stats.evaluations += 1;
        top.push(RankedAssignment { assignment, cost });
    }
    Ok(SolveOutcome {
        best: top[0].assignment.clone(),
        cost: top[0].cost,
        top,
        stats,
    })
}

/// Tightest budgets first, then edges in many cliques, then by id.
fn edge_order(instance: &ProblemInstance) -> Vec<EdgeId> {
    let topo = instance.topology();
    let mut order: Vec<EdgeId> = (0..instance.num_edges()).map(EdgeId).collect();
    order.sort_by_key(|&e| {
        let ks = topo.cliques_of(e);
        let tightest = ks
            .iter()
            .map(|&k| instance.cliques()[k].budget)
            .min()
            .unwrap_or(u32::MAX);
        (tightest, Reverse(ks.len()), e.index())
    });
    order
}

struct BranchAndBound<'a> {
    instance: &'a ProblemInstance,
    objective: Objective,
    top_l: usize,
    order: Vec<EdgeId>,
    partial: PartialAssignment<'a>,
    top: Vec<RankedAssignment>,
    stats: SolveStats,
    deadline: super::Deadline,
}

impl BranchAndBound<'_> {
    fn pruned(&self, bound: f64) -> bool {
        if self.top.len() < self.top_l {
            return false;
        }
        let worst = self.top[self.top.len() - 1].cost;
        // the sync relaxation is computed along a different rounding path
        // than the cost itself, so give it a relative slack
        let bound = match self.objective {
            Objective::Sync => bound - 1e-12 * bound.abs(),
            _ => bound,
        };
        bound >= worst
    }

    fn offer(&mut self, cost: f64) {
        if self.pruned(cost) {
            return;
        }
        let values = self
            .partial
            .values()
            .iter()
            .map(|v| v.expect("complete"))
            .collect();
        let pos = self.top.partition_point(|r| r.cost <= cost);
        self.top.insert(
            pos,
            RankedAssignment {
                assignment: Assignment::new(values),
                cost,
            },
        );
        self.top.truncate(self.top_l);
    }

    fn descend(&mut self, depth: usize) -> Result<()> {
        self.stats.expanded += 1;
        if self.stats.expanded % 256 == 0 && self.deadline.expired() {
            self.stats.incomplete = true;
        }
        if self.stats.incomplete {
            return Ok(());
        }
        let events = self.instance.events();
        if depth == self.order.len() {
            let cost = events.summarize(self.partial.values())?.cost(self.objective);
            self.stats.evaluations += 1;
            self.offer(cost);
            return Ok(());
        }

        let edge = self.order[depth];
        let mut children: Vec<(f64, JointValue)> = Vec::with_capacity(4);
        for value in JointValue::ALL {
            if !self.partial.admissible(edge, value) {
                continue;
            }
            self.partial.assign(edge, value);
            let bound = events
                .summarize(self.partial.values())?
                .lower_bound(self.objective);
            self.stats.evaluations += 1;
            self.partial.unassign(edge);
            children.push((bound, value));
        }
        children.sort_by(|x, y| x.0.total_cmp(&y.0));

        for (bound, value) in children {
            if self.pruned(bound) {
                continue;
            }
            self.partial.assign(edge, value);
            let r = self.descend(depth + 1);
            self.partial.unassign(edge);
            r?;
            if self.stats.incomplete {
                break;
            }
        }
        Ok(())
    }
}
