use std::collections::BTreeMap;

use super::{EdgeId, InstanceData, IntervalPair, JointEdge, Node, NodeId, RobotId};
use crate::error::{Error, Result};

/// Merges the per-robot projections of `pairs` into nodes.
///
/// Intervals on one robot that overlap or touch are unioned into a single
/// node whose `[enter, exit]` is the hull of its members. Every input pair
/// becomes one joint edge that keeps its own pairwise times. Node ids are
/// assigned robot by robot (ascending robot id) in path order; edge ids
/// follow the order of `pairs`.
pub fn merge_intervals(pairs: &[IntervalPair], density: u32) -> Result<InstanceData> {
    for (index, pair) in pairs.iter().enumerate() {
        check_pair(pair).map_err(|reason| Error::InvalidPair { index, reason })?;
    }

    // (enter, exit, pair index, side) per robot; side 0 = robot_a.
    let mut per_robot: BTreeMap<RobotId, Vec<(f64, f64, usize, usize)>> = BTreeMap::new();
    for (k, pair) in pairs.iter().enumerate() {
        per_robot
            .entry(pair.robot_a)
            .or_default()
            .push((pair.enter_a, pair.exit_a, k, 0));
        per_robot
            .entry(pair.robot_b)
            .or_default()
            .push((pair.enter_b, pair.exit_b, k, 1));
    }

    let mut nodes = Vec::new();
    let mut precedence = Vec::new();
    let mut owner = vec![[NodeId(0); 2]; pairs.len()];
    for (&robot, intervals) in per_robot.iter_mut() {
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)));
        let mut seq_index = 0;
        let mut i = 0;
        while i < intervals.len() {
            let id = NodeId(nodes.len());
            let (enter, mut exit) = (intervals[i].0, intervals[i].1);
            let mut j = i;
            while j < intervals.len() && intervals[j].0 <= exit {
                exit = exit.max(intervals[j].1);
                owner[intervals[j].2][intervals[j].3] = id;
                j += 1;
            }
            if seq_index > 0 {
                precedence.push((NodeId(id.0 - 1), id));
            }
            nodes.push(Node {
                id,
                robot,
                seq_index,
                enter,
                exit,
                density,
            });
            seq_index += 1;
            i = j;
        }
    }

    let joints = pairs
        .iter()
        .zip(&owner)
        .enumerate()
        .map(|(k, (pair, &[na, nb]))| {
            if na < nb {
                JointEdge {
                    id: EdgeId(k),
                    a: na,
                    b: nb,
                    enter_ab: pair.enter_a,
                    exit_ab: pair.exit_a,
                    enter_ba: pair.enter_b,
                    exit_ba: pair.exit_b,
                }
            } else {
                JointEdge {
                    id: EdgeId(k),
                    a: nb,
                    b: na,
                    enter_ab: pair.enter_b,
                    exit_ab: pair.exit_b,
                    enter_ba: pair.enter_a,
                    exit_ba: pair.exit_a,
                }
            }
        })
        .collect();

    Ok(InstanceData {
        robots: per_robot.keys().copied().collect(),
        nodes,
        precedence,
        joints,
        cliques: None,
    })
}

fn check_pair(pair: &IntervalPair) -> std::result::Result<(), String> {
    if pair.robot_a == pair.robot_b {
        return Err(format!("both sides belong to robot {}", pair.robot_a));
    }
    let times = [pair.enter_a, pair.exit_a, pair.enter_b, pair.exit_b];
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err("times must be finite and non-negative".into());
    }
    if pair.enter_a >= pair.exit_a || pair.enter_b >= pair.exit_b {
        return Err("enter must precede exit on both sides".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemInstance;
    use proptest::prelude::*;

    fn r(i: u64) -> RobotId {
        RobotId(i)
    }

    #[test]
    fn single_pair_is_not_merged() {
        let pair = IntervalPair::new(r(1), (2.0, 4.0), r(2), (3.0, 5.0));
        let data = merge_intervals(&[pair], 1).unwrap();
        assert_eq!(data.nodes.len(), 2);
        assert_eq!(data.joints.len(), 1);
        assert!(data.precedence.is_empty());
        assert_eq!((data.nodes[0].enter, data.nodes[0].exit), (2.0, 4.0));
        assert_eq!((data.nodes[1].enter, data.nodes[1].exit), (3.0, 5.0));
        let e = &data.joints[0];
        assert_eq!((e.a, e.b), (NodeId(0), NodeId(1)));
        assert_eq!((e.enter_ab, e.exit_ab, e.enter_ba, e.exit_ba), (2.0, 4.0, 3.0, 5.0));
    }

    #[test]
    fn overlapping_sections_merge_and_keep_pair_times() {
        let pairs = [
            IntervalPair::new(r(1), (2.0, 4.0), r(2), (0.0, 1.0)),
            IntervalPair::new(r(1), (3.0, 6.0), r(3), (7.0, 9.0)),
        ];
        let data = merge_intervals(&pairs, 1).unwrap();
        let r1: Vec<_> = data.nodes.iter().filter(|n| n.robot == r(1)).collect();
        assert_eq!(r1.len(), 1);
        assert_eq!((r1[0].enter, r1[0].exit), (2.0, 6.0));
        assert_eq!(data.joints.len(), 2);
        assert_eq!((data.joints[0].enter_ab, data.joints[0].exit_ab), (2.0, 4.0));
        assert_eq!((data.joints[1].enter_ab, data.joints[1].exit_ab), (3.0, 6.0));
    }

    #[test]
    fn disjoint_sections_form_a_chain() {
        let pairs = [
            IntervalPair::new(r(1), (2.0, 4.0), r(2), (0.0, 1.0)),
            IntervalPair::new(r(1), (5.0, 7.0), r(3), (7.0, 9.0)),
        ];
        let data = merge_intervals(&pairs, 1).unwrap();
        let r1: Vec<_> = data.nodes.iter().filter(|n| n.robot == r(1)).collect();
        assert_eq!(r1.len(), 2);
        assert_eq!(data.precedence, vec![(r1[0].id, r1[1].id)]);
        assert_eq!((r1[1].seq_index, r1[1].enter), (1, 5.0));
    }

    #[test]
    fn touching_sections_merge() {
        let pairs = [
            IntervalPair::new(r(1), (2.0, 4.0), r(2), (0.0, 1.0)),
            IntervalPair::new(r(1), (4.0, 7.0), r(3), (7.0, 9.0)),
        ];
        let data = merge_intervals(&pairs, 1).unwrap();
        assert_eq!(data.nodes.iter().filter(|n| n.robot == r(1)).count(), 1);
    }

    #[test]
    fn rejects_bad_pairs() {
        let same = IntervalPair::new(r(1), (2.0, 4.0), r(1), (3.0, 5.0));
        assert!(matches!(
            merge_intervals(&[same], 1),
            Err(Error::InvalidPair { index: 0, .. })
        ));
        let ok = IntervalPair::new(r(1), (2.0, 4.0), r(2), (3.0, 5.0));
        let flat = IntervalPair::new(r(1), (2.0, 2.0), r(2), (3.0, 5.0));
        assert!(matches!(
            merge_intervals(&[ok, flat], 1),
            Err(Error::InvalidPair { index: 1, .. })
        ));
    }

    fn arb_pairs() -> impl Strategy<Value = Vec<IntervalPair>> {
        prop::collection::vec(
            (0u64..4, 1u64..4, 0.0..20.0f64, 0.1..5.0f64, 0.0..20.0f64, 0.1..5.0f64),
            1..12,
        )
        .prop_map(|raw| {
            raw.into_iter()
                .map(|(a, off, sa, da, sb, db)| {
                    IntervalPair::new(r(a), (sa, sa + da), r((a + off) % 4), (sb, sb + db))
                })
                .filter(|p| p.robot_a != p.robot_b)
                .collect()
        })
    }

    proptest! {
        #[test]
        fn merged_nodes_cover_exactly_the_inputs(pairs in arb_pairs()) {
            prop_assume!(!pairs.is_empty());
            let data = merge_intervals(&pairs, 1).unwrap();
            for robot in &data.robots {
                let mut inputs: Vec<(f64, f64)> = pairs.iter().flat_map(|p| {
                    let mut v = vec![];
                    if p.robot_a == *robot { v.push((p.enter_a, p.exit_a)); }
                    if p.robot_b == *robot { v.push((p.enter_b, p.exit_b)); }
                    v
                }).collect();
                inputs.sort_by(|x, y| x.0.total_cmp(&y.0));
                let nodes: Vec<_> = data.nodes.iter().filter(|n| n.robot == *robot).collect();
                // disjoint and ordered
                for w in nodes.windows(2) {
                    prop_assert!(w[0].exit < w[1].enter);
                    prop_assert_eq!(w[0].seq_index + 1, w[1].seq_index);
                }
                // every input lies in exactly one node, every node endpoint is an input endpoint
                for (s, e) in &inputs {
                    let hits = nodes.iter().filter(|n| n.enter <= *s && *e <= n.exit).count();
                    prop_assert_eq!(hits, 1);
                }
                for n in &nodes {
                    prop_assert!(inputs.iter().any(|(s, _)| *s == n.enter));
                    prop_assert!(inputs.iter().any(|(_, e)| *e == n.exit));
                    // no gap inside a node: the union of member inputs is connected
                    let mut reach = n.enter;
                    for (s, e) in inputs.iter().filter(|(s, e)| n.enter <= *s && *e <= n.exit) {
                        prop_assert!(*s <= reach);
                        reach = reach.max(*e);
                    }
                    prop_assert_eq!(reach, n.exit);
                }
            }
            prop_assert!(ProblemInstance::new(data).is_ok());
        }
    }
}
