use crate::model::{EdgeId, ProblemInstance};
use crate::schedule::{Direction, JointValue};

/// Arc `(from, to)` induced by `value` on `edge`.
pub(crate) fn arc(instance: &ProblemInstance, edge: EdgeId, value: JointValue) -> (usize, usize) {
    let j = instance.joint(edge);
    match value.direction() {
        Direction::AToB => (j.a.index(), j.b.index()),
        Direction::BToA => (j.b.index(), j.a.index()),
    }
}

/// Node digraph with stamp-based reachability queries.
///
/// Each arc is tagged with the joint edge that induced it (`None` for
/// precedence arcs) so a query can ignore one edge.
#[derive(Debug, Clone)]
pub(crate) struct SearchGraph {
    succ: Vec<Vec<(usize, Option<usize>)>>,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<usize>,
}

impl SearchGraph {
    pub(crate) fn new(instance: &ProblemInstance) -> Self {
        let n = instance.num_nodes();
        let mut succ = vec![Vec::new(); n];
        for &(u, v) in instance.precedence() {
            succ[u.index()].push((v.index(), None));
        }
        Self {
            succ,
            stamp: vec![0; n],
            epoch: 0,
            stack: Vec::new(),
        }
    }

    pub(crate) fn push_arc(&mut self, from: usize, to: usize, edge: usize) {
        self.succ[from].push((to, Some(edge)));
    }

    pub(crate) fn remove_arc(&mut self, from: usize, edge: usize) {
        let list = &mut self.succ[from];
        let pos = list
            .iter()
            .rposition(|&(_, e)| e == Some(edge))
            .expect("arc present");
        list.swap_remove(pos);
    }

    /// Is there a path `from ⇝ to` that does not use `skip`'s arc?
    pub(crate) fn reaches(&mut self, from: usize, to: usize, skip: Option<usize>) -> bool {
        if from == to {
            return true;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.stack.clear();
        self.stack.push(from);
        self.stamp[from] = self.epoch;
        while let Some(u) = self.stack.pop() {
            for &(v, e) in &self.succ[u] {
                if skip.is_some() && e == skip {
                    continue;
                }
                if v == to {
                    return true;
                }
                if self.stamp[v] != self.epoch {
                    self.stamp[v] = self.epoch;
                    self.stack.push(v);
                }
            }
        }
        false
    }
}

/// Partially assigned edges with incremental cycle and budget checks.
pub(crate) struct PartialAssignment<'a> {
    instance: &'a ProblemInstance,
    values: Vec<Option<JointValue>>,
    graph: SearchGraph,
    remaining: Vec<u32>,
}

impl<'a> PartialAssignment<'a> {
    pub(crate) fn new(instance: &'a ProblemInstance) -> Self {
        Self {
            instance,
            values: vec![None; instance.num_edges()],
            graph: SearchGraph::new(instance),
            remaining: instance.cliques().iter().map(|k| k.budget).collect(),
        }
    }

    pub(crate) fn values(&self) -> &[Option<JointValue>] {
        &self.values
    }

    pub(crate) fn budget_left(&self, edge: EdgeId) -> bool {
        self.instance
            .topology()
            .cliques_of(edge)
            .iter()
            .all(|&k| self.remaining[k] > 0)
    }

    /// Can `edge` (currently unassigned) take `value` without closing a
    /// cycle or overflowing a clique?
    pub(crate) fn admissible(&mut self, edge: EdgeId, value: JointValue) -> bool {
        debug_assert!(self.values[edge.index()].is_none());
        if value.is_following() && !self.budget_left(edge) {
            return false;
        }
        let (from, to) = arc(self.instance, edge, value);
        !self.graph.reaches(to, from, None)
    }

    pub(crate) fn assign(&mut self, edge: EdgeId, value: JointValue) {
        debug_assert!(self.values[edge.index()].is_none());
        let (from, to) = arc(self.instance, edge, value);
        self.graph.push_arc(from, to, edge.index());
        if value.is_following() {
            for &k in self.instance.topology().cliques_of(edge) {
                self.remaining[k] -= 1;
            }
        }
        self.values[edge.index()] = Some(value);
    }

    pub(crate) fn unassign(&mut self, edge: EdgeId) {
        let value = self.values[edge.index()].take().expect("edge assigned");
        let (from, _) = arc(self.instance, edge, value);
        self.graph.remove_arc(from, edge.index());
        if value.is_following() {
            for &k in self.instance.topology().cliques_of(edge) {
                self.remaining[k] += 1;
            }
        }
    }
}
