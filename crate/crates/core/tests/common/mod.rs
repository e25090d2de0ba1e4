//! Oracles shared by the integration and acceptance tests. They work from
//! the raw instance data only and do not reuse the library's indices.
#![allow(dead_code)]

use std::collections::BTreeMap;

use coordforge::instances::{gen_instance_indexed, GenParams};
use coordforge::model::ProblemInstance;
use coordforge::{Assignment, JointValue};

/// Desk-scale instances: 2 to 8 robots, at most `sections` interfering pairs.
pub fn desk_params(sections: usize, seed: u64) -> GenParams {
    GenParams {
        robots_min: 2,
        robots_max: 8,
        sections_max: sections,
        seed,
        ..GenParams::default()
    }
}

pub fn desk_instances(count: usize, sections: usize, seed: u64) -> Vec<ProblemInstance> {
    let params = desk_params(sections, seed);
    (0..count as u64)
        .map(|k| gen_instance_indexed(&params, k).unwrap())
        .collect()
}

/// Acyclicity by Kahn's algorithm plus clique following counts.
pub fn is_feasible(instance: &ProblemInstance, assignment: &Assignment) -> bool {
    let n = instance.num_nodes();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    let mut arc = |u: usize, v: usize| {
        succ[u].push(v);
        indeg[v] += 1;
    };
    for &(u, v) in instance.precedence() {
        arc(u.0, v.0);
    }
    for (e, value) in instance.joints().iter().zip(assignment.values()) {
        match value {
            JointValue::AbExcl | JointValue::AbFollow => arc(e.a.0, e.b.0),
            JointValue::BaExcl | JointValue::BaFollow => arc(e.b.0, e.a.0),
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    if seen < n {
        return false;
    }
    instance.cliques().iter().all(|k| {
        let following = instance
            .joints()
            .iter()
            .zip(assignment.values())
            .filter(|(e, v)| {
                matches!(v, JointValue::AbFollow | JointValue::BaFollow)
                    && k.members.contains(&e.a)
                    && k.members.contains(&e.b)
            })
            .count();
        following as u32 <= k.budget
    })
}

/// All assignments passing [`is_feasible`], in base-4 counting order.
pub fn enumerate_feasible(instance: &ProblemInstance) -> Vec<Assignment> {
    let m = instance.num_edges();
    (0..4usize.pow(m as u32))
        .map(|code| Assignment::new((0..m).map(|k| JointValue::ALL[(code >> (2 * k)) & 3]).collect()))
        .filter(|a| is_feasible(instance, a))
        .collect()
}

/// Updated event times by plain fixed-point relaxation.
///
/// Returns, per robot in instance order, the sorted distinct expected
/// times with their updated values.
pub fn gauss_seidel(instance: &ProblemInstance, assignment: &Assignment) -> Vec<Vec<(f64, f64)>> {
    let robot_of = |node: usize| instance.nodes()[node].robot;
    let mut times: BTreeMap<u64, Vec<f64>> = instance.robots().iter().map(|r| (r.0, Vec::new())).collect();
    for e in instance.joints() {
        let ta = times.get_mut(&robot_of(e.a.0).0).unwrap();
        ta.extend([e.enter_ab, e.exit_ab]);
        let tb = times.get_mut(&robot_of(e.b.0).0).unwrap();
        tb.extend([e.enter_ba, e.exit_ba]);
    }
    for t in times.values_mut() {
        t.sort_by(f64::total_cmp);
        t.dedup();
    }
    let index = |robot: u64, t: f64| -> (u64, usize) {
        let list = &times[&robot];
        (robot, list.iter().position(|&x| x == t).unwrap())
    };

    // (earlier, later): later >= earlier in updated time
    let mut cons = Vec::new();
    for (e, value) in instance.joints().iter().zip(assignment.values()) {
        let (ra, rb) = (robot_of(e.a.0).0, robot_of(e.b.0).0);
        let a_in = index(ra, e.enter_ab);
        let a_out = index(ra, e.exit_ab);
        let b_in = index(rb, e.enter_ba);
        let b_out = index(rb, e.exit_ba);
        cons.push(match value {
            JointValue::AbExcl => (a_out, b_in),
            JointValue::BaExcl => (b_out, a_in),
            JointValue::AbFollow => (a_in, b_in),
            JointValue::BaFollow => (b_in, a_in),
        });
    }

    let mut upd: BTreeMap<u64, Vec<f64>> = times.iter().map(|(&r, t)| (r, t.clone())).collect();
    loop {
        let mut changed = false;
        for &((r0, i0), (r1, i1)) in &cons {
            let need = upd[&r0][i0];
            let cur = &mut upd.get_mut(&r1).unwrap()[i1];
            if need > *cur {
                *cur = need;
                changed = true;
            }
        }
        for (r, t) in &times {
            let u = upd.get_mut(r).unwrap();
            for k in 1..t.len() {
                // delays never decrease along the path
                let need = u[k - 1] - t[k - 1] + t[k];
                if need > u[k] {
                    u[k] = need;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    instance
        .robots()
        .iter()
        .map(|r| times[&r.0].iter().copied().zip(upd[&r.0].iter().copied()).collect())
        .collect()
}

/// Objective values from fixed-point completion times and delays.
pub fn oracle_costs(schedule: &[Vec<(f64, f64)>]) -> [f64; 4] {
    let n = schedule.len() as f64;
    let completion: Vec<f64> = schedule.iter().map(|s| s.last().map_or(0.0, |x| x.1)).collect();
    let avg = completion.iter().sum::<f64>() / n;
    let max = completion.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sync = avg + completion.iter().map(|c| (c - avg).abs()).sum::<f64>() / n;
    let delay = schedule
        .iter()
        .map(|s| {
            if s.is_empty() {
                0.0
            } else {
                s.iter().map(|(t, u)| u - t).sum::<f64>() / s.len() as f64
            }
        })
        .sum::<f64>()
        / n;
    [avg, max, sync, delay]
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
