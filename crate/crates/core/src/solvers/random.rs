use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{assignment_cost, SolveOutcome, SolveStats, SolverConfig};
use crate::decoder::{decode, BidSample};
use crate::error::Result;
use crate::model::ProblemInstance;

/// Draws a uniformly random bid/score sample for `instance`.
pub fn random_sample<R: Rng + ?Sized>(instance: &ProblemInstance, rng: &mut R) -> BidSample {
    // 1 - U[0,1) keeps every bid strictly positive
    let bids = (0..instance.num_nodes()).map(|_| 1.0 - rng.random::<f64>()).collect();
    let scores = (0..instance.num_edges()).map(|_| rng.random::<f64>()).collect();
    BidSample::new(bids, scores)
}

/// Decodes `random_samples` random samples and keeps the cheapest.
pub fn solve_random(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    let deadline = config.deadline();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = SolveStats::default();
    let mut best = None;
    for _ in 0..config.random_samples {
        if stats.evaluations > 0 && deadline.expired() {
            stats.incomplete = true;
            break;
        }
        let assignment = decode(instance, &random_sample(instance, &mut rng))?;
        let cost = assignment_cost(instance, &assignment, config.objective)?;
        stats.evaluations += 1;
        stats.expanded += 1;
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((assignment, cost));
        }
    }
    let (best, cost) = best.expect("at least one sample");
    stats.wall_time_s = deadline.elapsed();
    Ok(SolveOutcome {
        best,
        cost,
        top: Vec::new(),
        stats,
    })
}
