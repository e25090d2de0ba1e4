mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coordforge::decoder::decode;
use coordforge::instances::stitch;
use coordforge::model::{IntervalPair, ProblemInstance, RobotId};
use coordforge::schedule::check_feasible;
use coordforge::solvers::{
    fcfs_directions, random_sample, solve, solve_bbts, solve_cmaes, solve_exact, tabu_search, SolverConfig,
    SolverKind,
};
use coordforge::{JointValue, Objective};

use common::{desk_instances, enumerate_feasible};

fn two_robot(rho: u32) -> ProblemInstance {
    let pairs = [IntervalPair::new(RobotId(1), (2.0, 4.0), RobotId(2), (3.0, 5.0))];
    ProblemInstance::from_pairs(&pairs, rho).unwrap()
}

#[test]
fn partial_bounds_never_exceed_completed_costs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let instances = desk_instances(100, 14, 31);
    for t in 0..1000 {
        let inst = &instances[t % instances.len()];
        let full = decode(inst, &random_sample(inst, &mut rng)).unwrap();
        let values: Vec<Option<JointValue>> = full.values().iter().copied().map(Some).collect();
        let partial: Vec<Option<JointValue>> = values
            .iter()
            .map(|v| if rng.random_bool(0.5) { *v } else { None })
            .collect();
        let events = inst.events();
        let lower = events.summarize(&partial).unwrap();
        let done = events.summarize(&values).unwrap();
        for objective in Objective::ALL {
            // the sync bound is compared with the same relative slack the exact solver prunes with
            let cost = done.cost(objective);
            assert!(
                lower.lower_bound(objective) <= cost + 1e-12 * cost.abs(),
                "{objective}: {} > {}",
                lower.lower_bound(objective),
                done.cost(objective)
            );
        }
    }
}

#[test]
fn every_solver_returns_a_feasible_assignment() {
    let config = SolverConfig {
        cmaes_generations: 20,
        ..SolverConfig::default()
    };
    for inst in desk_instances(30, 10, 32) {
        for kind in SolverKind::ALL {
            let out = solve(kind, &inst, &config).unwrap();
            assert!(common::is_feasible(&inst, &out.best), "{kind}");
            assert!(check_feasible(&inst, &out.best).is_feasible(), "{kind}");
        }
    }
}

#[test]
fn stochastic_solvers_are_reproducible() {
    let config = SolverConfig {
        seed: 77,
        random_samples: 20,
        cmaes_generations: 15,
        ..SolverConfig::default()
    };
    for inst in desk_instances(10, 14, 33) {
        for kind in [SolverKind::Random, SolverKind::Fcfs, SolverKind::Tabu, SolverKind::Cmaes] {
            let a = solve(kind, &inst, &config).unwrap();
            let b = solve(kind, &inst, &config).unwrap();
            assert_eq!(a.best, b.best, "{kind}");
            assert_eq!(a.cost, b.cost, "{kind}");
            assert_eq!(a.stats.evaluations, b.stats.evaluations, "{kind}");
        }
    }
}

#[test]
fn heuristics_never_beat_the_optimum() {
    for inst in desk_instances(20, 8, 34) {
        for objective in Objective::ALL {
            let config = SolverConfig {
                cmaes_generations: 20,
                ..SolverConfig::with_objective(objective)
            };
            let opt = solve_exact(&inst, &config).unwrap().cost;
            for kind in SolverKind::ALL {
                assert!(solve(kind, &inst, &config).unwrap().cost >= opt, "{kind} {objective}");
            }
        }
    }
}

#[test]
fn top_l_matches_sorted_enumeration() {
    for inst in desk_instances(20, 6, 35) {
        let mut costs: Vec<f64> = enumerate_feasible(&inst)
            .iter()
            .map(|a| inst.events().summarize_assignment(a).unwrap().cost(Objective::Avg))
            .collect();
        costs.sort_by(f64::total_cmp);
        let config = SolverConfig {
            top_l: 10,
            ..SolverConfig::default()
        };
        let out = solve_exact(&inst, &config).unwrap();
        let got: Vec<f64> = out.top.iter().map(|r| r.cost).collect();
        assert_eq!(got, costs[..costs.len().min(10)].to_vec());
    }
}

#[test]
fn tabu_reaches_two_robot_optimum_quickly() {
    for rho in [1, 2] {
        let inst = two_robot(rho);
        let opt = solve_exact(&inst, &SolverConfig::default()).unwrap().cost;
        let start = decode(&inst, &random_sample(&inst, &mut ChaCha8Rng::seed_from_u64(0))).unwrap();
        let config = SolverConfig {
            tabu_max_iters: Some(2),
            ..SolverConfig::default()
        };
        assert_eq!(tabu_search(&inst, start, &config).unwrap().cost, opt);
    }
}

#[test]
fn cmaes_finds_two_robot_optimum() {
    for rho in [1, 2] {
        let inst = two_robot(rho);
        let opt = solve_exact(&inst, &SolverConfig::default()).unwrap().cost;
        let config = SolverConfig {
            cmaes_generations: 10,
            ..SolverConfig::default()
        };
        assert_eq!(solve_cmaes(&inst, &config).unwrap().cost, opt);
    }
}

#[test]
fn bbts_budget_one_is_first_in_dfs_order() {
    for inst in desk_instances(10, 8, 36) {
        let config = SolverConfig {
            bbts_candidates: 1,
            ..SolverConfig::default()
        };
        let out = solve_bbts(&inst, &config).unwrap();
        // enumeration counts edge 0 fastest; DFS fixes edge 0 first
        let first = enumerate_feasible(&inst)
            .into_iter()
            .min_by_key(|a| a.values().iter().map(|v| JointValue::ALL.iter().position(|x| x == v).unwrap()).collect::<Vec<_>>())
            .unwrap();
        assert_eq!(out.best, first);
    }
}

#[test]
fn fcfs_repairs_keep_the_digraph_acyclic() {
    for inst in desk_instances(300, 14, 37) {
        let fcfs = fcfs_directions(&inst);
        let values = fcfs
            .directions
            .iter()
            .map(|&d| JointValue::new(d, coordforge::schedule::EdgeKind::Exclusive))
            .collect();
        assert!(common::is_feasible(&inst, &coordforge::Assignment::new(values)));
    }
}

#[test]
fn union_optimum_composes_from_parts() {
    let parts = desk_instances(6, 5, 38);
    for pair in parts.chunks(2) {
        let union = stitch(pair, 0, 0).unwrap();
        let (n0, n1) = (pair[0].robots().len() as f64, pair[1].robots().len() as f64);
        let part = |k: usize, o: Objective| solve_exact(&pair[k], &SolverConfig::with_objective(o)).unwrap().cost;
        let avg = solve_exact(&union, &SolverConfig::with_objective(Objective::Avg)).unwrap().cost;
        let max = solve_exact(&union, &SolverConfig::with_objective(Objective::Max)).unwrap().cost;
        let expected_avg = (n0 * part(0, Objective::Avg) + n1 * part(1, Objective::Avg)) / (n0 + n1);
        assert!((avg - expected_avg).abs() < 1e-9, "{avg} vs {expected_avg}");
        assert_eq!(max, part(0, Objective::Max).max(part(1, Objective::Max)));
    }
}
