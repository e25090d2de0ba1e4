use serde::{Deserialize, Serialize};

use super::{check_feasible, Assignment, Direction, EdgeKind, JointValue, Objective};
use crate::error::{Error, Result};
use crate::model::{EdgeId, InstanceData, RobotId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Enter,
    Exit,
}

/// Which pairwise time an event stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRef {
    pub edge: EdgeId,
    pub side: Side,
    pub kind: EventKind,
}

/// The distinct expected enter/exit times of every robot, flattened into one
/// index space, plus the event indices each joint edge constrains.
#[derive(Debug, Clone)]
pub struct EventTable {
    robots: Vec<RobotId>,
    /// `offsets[r]..offsets[r + 1]` are robot position `r`'s events.
    offsets: Vec<usize>,
    expected: Vec<f64>,
    refs: Vec<Vec<EventRef>>,
    /// Per edge: [a enter, a exit, b enter, b exit].
    edge_events: Vec<[usize; 4]>,
}

impl EventTable {
    pub(crate) fn new(data: &InstanceData, topology: &Topology) -> Self {
        let mut per_robot: Vec<Vec<(f64, EventRef)>> = vec![Vec::new(); data.robots.len()];
        for e in &data.joints {
            let ra = topology.robot_of(e.a);
            let rb = topology.robot_of(e.b);
            for (r, side, kind, t) in [
                (ra, Side::A, EventKind::Enter, e.enter_ab),
                (ra, Side::A, EventKind::Exit, e.exit_ab),
                (rb, Side::B, EventKind::Enter, e.enter_ba),
                (rb, Side::B, EventKind::Exit, e.exit_ba),
            ] {
                per_robot[r].push((t, EventRef { edge: e.id, side, kind }));
            }
        }

        let mut offsets = vec![0];
        let mut expected = Vec::new();
        let mut refs: Vec<Vec<EventRef>> = Vec::new();
        let mut edge_events = vec![[0usize; 4]; data.joints.len()];
        for mut events in per_robot {
            events.sort_by(|x, y| x.0.total_cmp(&y.0));
            let start = expected.len();
            for (t, r) in events {
                // equal expected times collapse into one event
                if expected.len() == start || *expected.last().unwrap() != t {
                    expected.push(t);
                    refs.push(Vec::new());
                }
                let idx = expected.len() - 1;
                refs[idx].push(r);
                let slot = match (r.side, r.kind) {
                    (Side::A, EventKind::Enter) => 0,
                    (Side::A, EventKind::Exit) => 1,
                    (Side::B, EventKind::Enter) => 2,
                    (Side::B, EventKind::Exit) => 3,
                };
                edge_events[r.edge.index()][slot] = idx;
            }
            offsets.push(expected.len());
        }

        Self {
            robots: data.robots.clone(),
            offsets,
            expected,
            refs,
            edge_events,
        }
    }

    pub fn num_events(&self) -> usize {
        self.expected.len()
    }

    pub fn expected(&self) -> &[f64] {
        &self.expected
    }

    /// Event index range of robot position `r`.
    pub fn robot_events(&self, r: usize) -> std::ops::Range<usize> {
        self.offsets[r]..self.offsets[r + 1]
    }

    pub fn edge_events(&self, edge: EdgeId) -> [usize; 4] {
        self.edge_events[edge.index()]
    }

    /// The cross-robot constraint `later ≥ earlier` imposed by `value`, as
    /// (earlier event, later event).
    pub fn constraint(&self, edge: EdgeId, value: JointValue) -> (usize, usize) {
        let [a_in, a_out, b_in, b_out] = self.edge_events[edge.index()];
        match (value.direction(), value.kind()) {
            (Direction::AToB, EdgeKind::Exclusive) => (a_out, b_in),
            (Direction::BToA, EdgeKind::Exclusive) => (b_out, a_in),
            (Direction::AToB, EdgeKind::Following) => (a_in, b_in),
            (Direction::BToA, EdgeKind::Following) => (b_in, a_in),
        }
    }

    /// Per-event delays of the componentwise-least schedule under the
    /// values given (unassigned edges impose nothing).
    ///
    /// Delays are non-decreasing along each robot's events and every
    /// assigned edge holds `updated(later) ≥ updated(earlier)`. Solved as a
    /// longest path over the event graph in topological order.
    pub fn delays(&self, values: &[Option<JointValue>]) -> Result<Vec<f64>> {
        let m = self.expected.len();
        let mut indeg = vec![0u32; m];
        let mut first = vec![usize::MAX; m];
        let mut next = Vec::with_capacity(values.len());
        let mut target = Vec::with_capacity(values.len());
        for (k, v) in values.iter().enumerate() {
            if let Some(v) = v {
                let (from, to) = self.constraint(EdgeId(k), *v);
                target.push(to);
                next.push(first[from]);
                first[from] = target.len() - 1;
                indeg[to] += 1;
            }
        }
        for r in 0..self.robots.len() {
            for i in self.offsets[r] + 1..self.offsets[r + 1] {
                indeg[i] += 1;
            }
        }
        let mut is_last = vec![false; m];
        for r in 0..self.robots.len() {
            if self.offsets[r + 1] > self.offsets[r] {
                is_last[self.offsets[r + 1] - 1] = true;
            }
        }

        let mut delay = vec![0.0f64; m];
        let mut stack: Vec<usize> = (0..m).rev().filter(|&i| indeg[i] == 0).collect();
        let mut done = 0;
        while let Some(u) = stack.pop() {
            done += 1;
            let reached = self.expected[u] + delay[u];
            let mut arc = first[u];
            while arc != usize::MAX {
                let v = target[arc];
                let need = reached - self.expected[v];
                if need > delay[v] {
                    delay[v] = need;
                }
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
                arc = next[arc];
            }
            if !is_last[u] {
                let v = u + 1;
                if delay[u] > delay[v] {
                    delay[v] = delay[u];
                }
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        if done != m {
            return Err(Error::EventOrderContradiction);
        }
        Ok(delay)
    }

    /// Completion time and mean delay per robot for the given values.
    pub fn summarize(&self, values: &[Option<JointValue>]) -> Result<ScheduleSummary> {
        let delay = self.delays(values)?;
        Ok(self.summary_from_delays(&delay))
    }

    /// [`Self::summarize`] for a complete assignment.
    pub fn summarize_assignment(&self, assignment: &Assignment) -> Result<ScheduleSummary> {
        let values: Vec<Option<JointValue>> = assignment.values().iter().copied().map(Some).collect();
        self.summarize(&values)
    }

    fn summary_from_delays(&self, delay: &[f64]) -> ScheduleSummary {
        let n = self.robots.len();
        let mut completion = Vec::with_capacity(n);
        let mut mean_delay = Vec::with_capacity(n);
        for r in 0..n {
            let range = self.robot_events(r);
            if range.is_empty() {
                completion.push(0.0);
                mean_delay.push(0.0);
                continue;
            }
            let last = range.end - 1;
            completion.push(self.expected[last] + delay[last]);
            let len = range.len() as f64;
            mean_delay.push(delay[range].iter().sum::<f64>() / len);
        }
        ScheduleSummary {
            completion,
            mean_delay,
        }
    }
}

/// Per-robot aggregates every objective is computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSummary {
    pub completion: Vec<f64>,
    pub mean_delay: Vec<f64>,
}

impl ScheduleSummary {
    pub fn cost(&self, objective: Objective) -> f64 {
        let n = self.completion.len();
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        let avg = self.completion.iter().sum::<f64>() / nf;
        match objective {
            Objective::Avg => avg,
            Objective::Max => self.completion.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Objective::Sync => avg + self.completion.iter().map(|c| (c - avg).abs()).sum::<f64>() / nf,
            Objective::Delay => self.mean_delay.iter().sum::<f64>() / nf,
        }
    }

    /// A lower bound on `cost(objective)` of any schedule whose completions
    /// and delays dominate these.
    ///
    /// Equal to the cost for every objective except `Sync`, which is not
    /// monotone in the completion times for three or more robots; there the
    /// bound is `max(avg, avg + 2 (max - avg) / n)`.
    pub fn lower_bound(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Sync => {
                let n = self.completion.len();
                if n == 0 {
                    return 0.0;
                }
                let nf = n as f64;
                let avg = self.cost(Objective::Avg);
                let max = self.cost(Objective::Max);
                avg.max(avg + 2.0 * (max - avg) / nf)
            }
            other => self.cost(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub expected: f64,
    pub updated: f64,
    pub delay: f64,
    pub refs: Vec<EventRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotTimeline {
    pub robot: RobotId,
    pub events: Vec<TimedEvent>,
    /// Last updated event time, or 0 for a robot without events.
    pub completion: f64,
}

/// Minimal updated event times for an assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub robots: Vec<RobotTimeline>,
    /// False when some clique exceeds its following budget.
    pub feasible: bool,
}

impl ScheduleResult {
    pub fn completions(&self) -> Vec<f64> {
        self.robots.iter().map(|r| r.completion).collect()
    }

    pub fn summary(&self) -> ScheduleSummary {
        ScheduleSummary {
            completion: self.completions(),
            mean_delay: self
                .robots
                .iter()
                .map(|r| {
                    if r.events.is_empty() {
                        0.0
                    } else {
                        r.events.iter().map(|e| e.delay).sum::<f64>() / r.events.len() as f64
                    }
                })
                .collect(),
        }
    }
}

/// Computes the componentwise-least updated event times for `assignment`.
///
/// Fails when the induced digraph has a cycle; a density violation is
/// reported through [`ScheduleResult::feasible`] instead.
pub fn updated_times(
    instance: &crate::model::ProblemInstance,
    assignment: &Assignment,
) -> Result<ScheduleResult> {
    assignment.check_len(instance)?;
    let report = check_feasible(instance, assignment);
    if report.cycle.is_some() {
        return Err(Error::Infeasible(report.describe()));
    }
    let table = instance.events();
    let values: Vec<Option<JointValue>> = assignment.values().iter().copied().map(Some).collect();
    let delay = table.delays(&values)?;
    let robots = table
        .robots
        .iter()
        .enumerate()
        .map(|(r, &robot)| {
            let events: Vec<TimedEvent> = table
                .robot_events(r)
                .map(|i| TimedEvent {
                    expected: table.expected[i],
                    updated: table.expected[i] + delay[i],
                    delay: delay[i],
                    refs: table.refs[i].clone(),
                })
                .collect();
            let completion = events.last().map_or(0.0, |e| e.updated);
            RobotTimeline {
                robot,
                events,
                completion,
            }
        })
        .collect();
    Ok(ScheduleResult {
        robots,
        feasible: report.is_feasible(),
    })
}

/// Cost of a computed schedule under `objective`.
pub fn cost(result: &ScheduleResult, objective: Objective) -> f64 {
    result.summary().cost(objective)
}

/// Cost of `assignment`, failing if it is infeasible.
pub fn evaluate(
    instance: &crate::model::ProblemInstance,
    assignment: &Assignment,
    objective: Objective,
) -> Result<f64> {
    let result = updated_times(instance, assignment)?;
    if !result.feasible {
        return Err(Error::Infeasible(check_feasible(instance, assignment).describe()));
    }
    Ok(cost(&result, objective))
}
