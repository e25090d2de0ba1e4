use super::fcfs::fcfs_assignment;
use super::search::{arc, SearchGraph};
use super::{as_partial, assignment_cost, SolveOutcome, SolveStats, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{EdgeId, ProblemInstance};
use crate::schedule::{check_feasible, Assignment, JointValue};

/// Tabu search started from the FCFS assignment.
pub fn solve_tabu(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    let start = fcfs_assignment(instance, config.seed)?;
    tabu_search(instance, start, config)
}

/// Best-improvement tabu search from a feasible `start`.
///
/// The neighbourhood flips the direction of one edge (kept only if the
/// digraph stays acyclic) or toggles its type (kept only if every clique
/// containing it still respects its budget). A moved edge is tabu for
/// `tabu_tenure` iterations unless the move beats the incumbent.
pub fn tabu_search(instance: &ProblemInstance, start: Assignment, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    start.check_len(instance)?;
    let report = check_feasible(instance, &start);
    if !report.is_feasible() {
        return Err(Error::Infeasible(report.describe()));
    }
    let deadline = config.deadline();
    let m = instance.num_edges();
    let max_iters = config.tabu_max_iters.unwrap_or(200 * m);
    let events = instance.events();
    let topo = instance.topology();

    let mut graph = SearchGraph::new(instance);
    for (e, &v) in start.values().iter().enumerate() {
        let (from, to) = arc(instance, EdgeId(e), v);
        graph.push_arc(from, to, e);
    }
    let mut following = vec![0u32; instance.cliques().len()];
    for (e, v) in start.values().iter().enumerate() {
        if v.is_following() {
            for &k in topo.cliques_of(EdgeId(e)) {
                following[k] += 1;
            }
        }
    }

    let mut values = as_partial(&start);
    let mut stats = SolveStats::default();
    let mut best_cost = assignment_cost(instance, &start, config.objective)?;
    stats.evaluations += 1;
    let mut best = start;
    let mut tabu_until = vec![0usize; m];

    for iter in 0..max_iters {
        if deadline.expired() {
            stats.incomplete = true;
            break;
        }
        stats.expanded += 1;
        let mut chosen: Option<(usize, JointValue, f64)> = None;
        for e in 0..m {
            let current = values[e].expect("complete");
            for next in [current.reversed(), current.toggled()] {
                let feasible = if next.direction() != current.direction() {
                    let (from, to) = arc(instance, EdgeId(e), current);
                    !graph.reaches(from, to, Some(e))
                } else {
                    !next.is_following()
                        || topo
                            .cliques_of(EdgeId(e))
                            .iter()
                            .all(|&k| following[k] < instance.cliques()[k].budget)
                };
                if !feasible {
                    continue;
                }
                values[e] = Some(next);
                let cost = events.summarize(&values)?.cost(config.objective);
                values[e] = Some(current);
                stats.evaluations += 1;
                if tabu_until[e] > iter && cost >= best_cost {
                    continue;
                }
                if chosen.is_none_or(|(_, _, c)| cost < c) {
                    chosen = Some((e, next, cost));
                }
            }
        }
        let Some((e, next, cost)) = chosen else {
            break;
        };

        let current = values[e].expect("complete");
        let (from, _) = arc(instance, EdgeId(e), current);
        graph.remove_arc(from, e);
        let (from, to) = arc(instance, EdgeId(e), next);
        graph.push_arc(from, to, e);
        if current.is_following() != next.is_following() {
            for &k in topo.cliques_of(EdgeId(e)) {
                if next.is_following() {
                    following[k] += 1;
                } else {
                    following[k] -= 1;
                }
            }
        }
        values[e] = Some(next);
        tabu_until[e] = iter + config.tabu_tenure + 1;
        if cost < best_cost {
            best_cost = cost;
            best = Assignment::new(values.iter().map(|v| v.expect("complete")).collect());
        }
    }

    stats.wall_time_s = deadline.elapsed();
    Ok(SolveOutcome {
        best,
        cost: best_cost,
        top: Vec::new(),
        stats,
    })
}
