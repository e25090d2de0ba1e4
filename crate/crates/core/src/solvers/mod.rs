//! Solvers for the assignment problem. All of them return feasible
//! assignments and score them with [`crate::schedule::ScheduleSummary::cost`].

mod bbts;
mod cmaes;
mod exact;
mod fcfs;
mod milp;
mod random;
mod search;
mod tabu;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::decoder::{decode, BidSample};
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::schedule::{Assignment, JointValue, Objective};

pub use bbts::solve_bbts;
pub use cmaes::solve_cmaes;
pub use exact::solve_exact;
pub use fcfs::{fcfs_directions, solve_fcfs, FcfsDirections};
pub use milp::export_milp;
pub use random::{random_sample, solve_random};
pub use tabu::{solve_tabu, tabu_search};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Random,
    Fcfs,
    Tabu,
    Cmaes,
    Bbts,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        Self::Exact,
        Self::Random,
        Self::Fcfs,
        Self::Tabu,
        Self::Cmaes,
        Self::Bbts,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Random => "random",
            Self::Fcfs => "fcfs",
            Self::Tabu => "tabu",
            Self::Cmaes => "cmaes",
            Self::Bbts => "bbts",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown solver {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub objective: Objective,
    pub seed: u64,
    /// Wall-clock budget per solve, seconds.
    pub time_budget: f64,
    /// Number of lowest-cost assignments the exact solver keeps.
    pub top_l: usize,
    /// Decoded samples drawn by the random solver.
    pub random_samples: usize,
    pub tabu_tenure: usize,
    /// Defaults to `200 · |A|` when unset.
    pub tabu_max_iters: Option<usize>,
    /// Defaults to `4 + ⌊3 ln n⌋` when unset.
    pub cmaes_population: Option<usize>,
    pub cmaes_generations: usize,
    pub cmaes_sigma0: f64,
    pub bbts_candidates: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Avg,
            seed: 0,
            time_budget: 60.0,
            top_l: 1,
            random_samples: 1,
            tabu_tenure: 7,
            tabu_max_iters: None,
            cmaes_population: None,
            cmaes_generations: 100,
            cmaes_sigma0: 0.5,
            bbts_candidates: 1000,
        }
    }
}

impl SolverConfig {
    pub fn with_objective(objective: Objective) -> Self {
        Self {
            objective,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(format!("{what} must be positive")));
        if !(self.time_budget > 0.0) {
            return bad("time_budget");
        }
        if self.top_l == 0 {
            return bad("top_l");
        }
        if self.random_samples == 0 {
            return bad("random_samples");
        }
        if self.bbts_candidates == 0 {
            return bad("bbts_candidates");
        }
        if self.cmaes_generations == 0 || !(self.cmaes_sigma0 > 0.0) {
            return bad("cmaes_generations and cmaes_sigma0");
        }
        if self.tabu_max_iters == Some(0) || self.cmaes_population == Some(0) {
            return bad("tabu_max_iters and cmaes_population");
        }
        Ok(())
    }

    pub(crate) fn deadline(&self) -> Deadline {
        Deadline::new(self.time_budget)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAssignment {
    pub assignment: Assignment,
    pub cost: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Search nodes expanded (exact, B-BTS) or iterations/generations.
    pub expanded: u64,
    /// Schedule evaluations.
    pub evaluations: u64,
    pub wall_time_s: f64,
    /// The time budget ran out before the search finished.
    pub incomplete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub best: Assignment,
    pub cost: f64,
    /// Ascending by cost; filled by the exact solver when `top_l > 1`.
    pub top: Vec<RankedAssignment>,
    pub stats: SolveStats,
}

/// Runs `kind` on `instance`.
pub fn solve(kind: SolverKind, instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    match kind {
        SolverKind::Exact => solve_exact(instance, config),
        SolverKind::Random => solve_random(instance, config),
        SolverKind::Fcfs => solve_fcfs(instance, config),
        SolverKind::Tabu => solve_tabu(instance, config),
        SolverKind::Cmaes => solve_cmaes(instance, config),
        SolverKind::Bbts => solve_bbts(instance, config),
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    start: Instant,
    budget: Duration,
}

impl Deadline {
    pub(crate) fn new(seconds: f64) -> Self {
        Self {
            start: Instant::now(),
            budget: Duration::from_secs_f64(seconds.min(1e9)),
        }
    }

    pub(crate) fn expired(&self) -> bool {
        self.start.elapsed() > self.budget
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Cost of a complete assignment that is known to be feasible.
pub(crate) fn assignment_cost(instance: &ProblemInstance, assignment: &Assignment, objective: Objective) -> Result<f64> {
    Ok(instance
        .events()
        .summarize_assignment(assignment)?
        .cost(objective))
}

/// A feasible fallback: unit bids, all-zero scores.
pub(crate) fn default_assignment(instance: &ProblemInstance) -> Result<Assignment> {
    decode(
        instance,
        &BidSample::new(vec![1.0; instance.num_nodes()], vec![0.0; instance.num_edges()]),
    )
}

pub(crate) fn as_partial(assignment: &Assignment) -> Vec<Option<JointValue>> {
    assignment.values().iter().copied().map(Some).collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;
    use crate::schedule::check_feasible;

    #[test]
    fn names_round_trip() {
        for k in SolverKind::ALL {
            assert_eq!(k.as_str().parse::<SolverKind>().unwrap(), k);
        }
        assert!("gurobi".parse::<SolverKind>().is_err());
    }

    #[test]
    fn config_checks() {
        assert!(SolverConfig::default().check().is_ok());
        let bad = SolverConfig {
            time_budget: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.check().is_err());
        let bad = SolverConfig {
            top_l: 0,
            ..SolverConfig::default()
        };
        assert!(solve(SolverKind::Exact, &fixtures::two_robot(1), &bad).is_err());
    }

    #[test]
    fn every_solver_is_feasible_on_fixtures() {
        for inst in [fixtures::two_robot(1), fixtures::two_robot(2), fixtures::triangle(1), fixtures::triangle(2)] {
            for kind in SolverKind::ALL {
                let out = solve(kind, &inst, &SolverConfig::default()).unwrap();
                assert!(check_feasible(&inst, &out.best).is_feasible(), "{kind}");
                let c = crate::schedule::evaluate(&inst, &out.best, Objective::Avg).unwrap();
                assert_eq!(c, out.cost, "{kind}");
            }
        }
    }
}
