use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{density_budget, maximal_cliques, InstanceData, NodeId, RobotId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonDenseId,
    DuplicateRobot,
    UnknownRobot,
    UnknownNode,
    DegenerateInterval,
    InvalidTime,
    ZeroDensity,
    SectionOrder,
    PrecedenceCrossRobot,
    PrecedenceNotConsecutive,
    MissingPrecedence,
    DuplicatePrecedence,
    NonCanonicalEdge,
    SameRobotEdge,
    PairTimesOutsideNode,
    CliqueMismatch,
    CliqueBudget,
}

impl ViolationKind {
    fn label(self) -> &'static str {
        match self {
            Self::NonDenseId => "non-dense id",
            Self::DuplicateRobot => "duplicate robot",
            Self::UnknownRobot => "unknown robot",
            Self::UnknownNode => "unknown node",
            Self::DegenerateInterval => "degenerate interval",
            Self::InvalidTime => "invalid time",
            Self::ZeroDensity => "zero density",
            Self::SectionOrder => "section order",
            Self::PrecedenceCrossRobot => "precedence across robots",
            Self::PrecedenceNotConsecutive => "precedence not consecutive",
            Self::MissingPrecedence => "missing precedence",
            Self::DuplicatePrecedence => "duplicate precedence",
            Self::NonCanonicalEdge => "non-canonical edge",
            Self::SameRobotEdge => "joint edge within one robot",
            Self::PairTimesOutsideNode => "pair times outside node",
            Self::CliqueMismatch => "clique mismatch",
            Self::CliqueBudget => "clique budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.detail)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, kind: ViolationKind, detail: impl Into<String>) {
        self.0.push(Violation {
            kind,
            detail: detail.into(),
        });
    }
}

/// Checks every structural invariant of an instance and returns all
/// violations found (empty when the instance is well formed).
pub fn validate(data: &InstanceData) -> Vec<Violation> {
    use ViolationKind::*;

    let mut report = Report(Vec::new());
    let n = data.nodes.len();

    let mut robots = HashSet::new();
    for r in &data.robots {
        if !robots.insert(*r) {
            report.push(DuplicateRobot, format!("{r} listed twice"));
        }
    }

    let mut per_robot: BTreeMap<RobotId, Vec<usize>> = BTreeMap::new();
    for (i, node) in data.nodes.iter().enumerate() {
        if node.id.index() != i {
            report.push(NonDenseId, format!("node at position {i} has id {}", node.id));
        }
        if !robots.contains(&node.robot) {
            report.push(UnknownRobot, format!("node {} belongs to {}", node.id, node.robot));
        }
        if !node.enter.is_finite() || !node.exit.is_finite() || node.enter < 0.0 {
            report.push(InvalidTime, format!("node {} has times [{}, {}]", node.id, node.enter, node.exit));
        } else if node.enter >= node.exit {
            report.push(DegenerateInterval, format!("node {} has [{}, {}]", node.id, node.enter, node.exit));
        }
        if node.density == 0 {
            report.push(ZeroDensity, format!("node {}", node.id));
        }
        per_robot.entry(node.robot).or_default().push(i);
    }

    // each robot's nodes: seq 0..k, strictly increasing, pairwise disjoint
    let mut expected_prec = HashSet::new();
    for (robot, idx) in &mut per_robot {
        idx.sort_by_key(|&i| data.nodes[i].seq_index);
        for (pos, &i) in idx.iter().enumerate() {
            if data.nodes[i].seq_index != pos {
                report.push(
                    SectionOrder,
                    format!("{robot}: node {} has seq_index {} at position {pos}", data.nodes[i].id, data.nodes[i].seq_index),
                );
            }
        }
        for w in idx.windows(2) {
            let (p, q) = (&data.nodes[w[0]], &data.nodes[w[1]]);
            if !(p.exit < q.enter) {
                report.push(
                    SectionOrder,
                    format!("{robot}: node {} [{}, {}] does not end before node {} [{}, {}]", p.id, p.enter, p.exit, q.id, q.enter, q.exit),
                );
            }
            expected_prec.insert((w[0], w[1]));
        }
    }

    let mut seen_prec = HashSet::new();
    for &(u, v) in &data.precedence {
        if u.index() >= n || v.index() >= n {
            report.push(UnknownNode, format!("precedence ({u}, {v})"));
            continue;
        }
        if !seen_prec.insert((u.index(), v.index())) {
            report.push(DuplicatePrecedence, format!("({u}, {v})"));
            continue;
        }
        let (nu, nv) = (&data.nodes[u.index()], &data.nodes[v.index()]);
        if nu.robot != nv.robot {
            report.push(PrecedenceCrossRobot, format!("({u}, {v}) joins {} and {}", nu.robot, nv.robot));
        } else if !expected_prec.contains(&(u.index(), v.index())) {
            report.push(PrecedenceNotConsecutive, format!("({u}, {v})"));
        }
    }
    for &(u, v) in &expected_prec {
        if !seen_prec.contains(&(u, v)) {
            report.push(MissingPrecedence, format!("({}, {})", NodeId(u), NodeId(v)));
        }
    }

    let mut edges_ok = true;
    for (k, e) in data.joints.iter().enumerate() {
        if e.id.index() != k {
            report.push(NonDenseId, format!("edge at position {k} has id {}", e.id));
        }
        if e.a.index() >= n || e.b.index() >= n {
            report.push(UnknownNode, format!("edge {} joins {} and {}", e.id, e.a, e.b));
            edges_ok = false;
            continue;
        }
        if e.a >= e.b {
            report.push(NonCanonicalEdge, format!("edge {} stored as ({}, {})", e.id, e.a, e.b));
        }
        let (na, nb) = (&data.nodes[e.a.index()], &data.nodes[e.b.index()]);
        if na.robot == nb.robot {
            report.push(SameRobotEdge, format!("edge {} on {}", e.id, na.robot));
        }
        for (node, enter, exit) in [(na, e.enter_ab, e.exit_ab), (nb, e.enter_ba, e.exit_ba)] {
            if !enter.is_finite() || !exit.is_finite() || enter < 0.0 {
                report.push(InvalidTime, format!("edge {} side {} has [{enter}, {exit}]", e.id, node.id));
            } else if enter >= exit {
                report.push(DegenerateInterval, format!("edge {} side {} has [{enter}, {exit}]", e.id, node.id));
            } else if enter < node.enter || exit > node.exit {
                report.push(
                    PairTimesOutsideNode,
                    format!("edge {} side {}: [{enter}, {exit}] not within [{}, {}]", e.id, node.id, node.enter, node.exit),
                );
            }
        }
    }

    if let Some(cliques) = &data.cliques {
        if edges_ok {
            let expected = maximal_cliques(data);
            let given: HashSet<Vec<NodeId>> = cliques
                .iter()
                .map(|c| {
                    let mut m = c.members.clone();
                    m.sort();
                    m
                })
                .collect();
            let wanted: HashSet<Vec<NodeId>> = expected.iter().map(|c| c.members.clone()).collect();
            if given != wanted || given.len() != cliques.len() {
                report.push(
                    CliqueMismatch,
                    format!("{} cliques given, {} maximal cliques expected", cliques.len(), expected.len()),
                );
            }
        }
        for (k, c) in cliques.iter().enumerate() {
            if c.members.iter().any(|v| v.index() >= n) {
                report.push(UnknownNode, format!("clique {k}"));
                continue;
            }
            let rho = c.members.iter().map(|v| data.nodes[v.index()].density).min().unwrap_or(0);
            if c.density != rho || c.budget != density_budget(rho) {
                report.push(
                    CliqueBudget,
                    format!("clique {k}: density {} budget {}, expected {} and {}", c.density, c.budget, rho, density_budget(rho)),
                );
            }
        }
    }

    report.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    fn kinds(data: &InstanceData) -> Vec<ViolationKind> {
        validate(data).into_iter().map(|v| v.kind).collect()
    }

    #[test]
    fn well_formed_instance_is_ok() {
        assert!(validate(fixtures::two_robot(1).data()).is_empty());
        assert!(validate(fixtures::triangle(3).data()).is_empty());
    }

    #[test]
    fn degenerate_node() {
        let mut data = fixtures::two_robot(1).data().clone();
        data.nodes[1].enter = 6.0;
        let k = kinds(&data);
        assert!(k.contains(&ViolationKind::DegenerateInterval), "{k:?}");
    }

    #[test]
    fn cross_robot_precedence() {
        let mut data = fixtures::two_robot(1).data().clone();
        data.precedence.push((NodeId(0), NodeId(1)));
        assert!(kinds(&data).contains(&ViolationKind::PrecedenceCrossRobot));
    }

    #[test]
    fn reports_all_violations() {
        let mut data = fixtures::two_robot(1).data().clone();
        data.nodes[0].density = 0;
        data.joints[0].exit_ba = 50.0;
        data.joints[0].a = NodeId(1);
        data.joints[0].b = NodeId(0);
        let k = kinds(&data);
        for want in [
            ViolationKind::ZeroDensity,
            ViolationKind::NonCanonicalEdge,
            ViolationKind::PairTimesOutsideNode,
            ViolationKind::CliqueBudget,
        ] {
            assert!(k.contains(&want), "missing {want:?} in {k:?}");
        }
    }

    #[test]
    fn stale_cliques_are_flagged() {
        let mut data = fixtures::triangle(1).data().clone();
        data.joints.pop();
        assert!(kinds(&data).contains(&ViolationKind::CliqueMismatch));
    }

    #[test]
    fn missing_and_dangling_references() {
        let pairs = [
            crate::model::IntervalPair::new(RobotId(0), (0.0, 1.0), RobotId(1), (0.0, 1.0)),
            crate::model::IntervalPair::new(RobotId(0), (2.0, 3.0), RobotId(1), (2.0, 3.0)),
        ];
        let mut data = crate::model::merge_intervals(&pairs, 1).unwrap();
        data.precedence.clear();
        data.precedence.push((NodeId(0), NodeId(9)));
        let k = kinds(&data);
        assert!(k.contains(&ViolationKind::MissingPrecedence));
        assert!(k.contains(&ViolationKind::UnknownNode));
    }
}
