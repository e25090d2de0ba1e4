//! Benchmark runs, sample evaluation and reporting.

mod report;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{decode, BidSample};
use crate::error::{Error, Result};
use crate::instances::DatasetRecord;
use crate::model::ProblemInstance;
use crate::schedule::{Assignment, Objective};
use crate::solvers::{solve, SolverConfig, SolverKind};

pub use report::{report, write_report, BucketSummary, Report, SolverSummary, ROBOT_BUCKETS};

/// What the optimality ratio of a record is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    /// Exact optimum from the dataset.
    Oracle,
    /// Best cost any benchmarked solver (or a stored heuristic) reached.
    RelativeRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: u64,
    pub robots: usize,
    pub edges: usize,
    pub solver: SolverKind,
    pub objective: Objective,
    pub cost: f64,
    pub oracle_cost: Option<f64>,
    pub optimality_ratio: Option<f64>,
    pub wall_time_s: f64,
    pub samples_used: u64,
    pub ratio_kind: Option<RatioKind>,
    pub incomplete: bool,
}

/// `reference / cost`, with equal costs (including two zeros) scoring 1.
pub fn optimality_ratio(reference: f64, cost: f64) -> f64 {
    if cost == reference {
        1.0
    } else {
        reference / cost
    }
}

/// Runs every solver on every dataset record, in parallel.
///
/// Each run uses the record's objective and seed `config.seed + id`.
/// Records without an exact optimum are scored against the best cost seen
/// on that instance and marked [`RatioKind::RelativeRatio`]. Output is
/// ordered by dataset order, then by `solvers` order.
pub fn bench(dataset: &[DatasetRecord], solvers: &[SolverKind], config: &SolverConfig) -> Result<Vec<BenchRecord>> {
    config.check()?;
    let jobs: Vec<(usize, SolverKind)> = (0..dataset.len())
        .flat_map(|i| solvers.iter().map(move |&s| (i, s)))
        .collect();
    let mut out: Vec<BenchRecord> = jobs
        .par_iter()
        .map(|&(i, solver)| {
            let record = &dataset[i];
            let run_config = SolverConfig {
                objective: record.objective,
                seed: config.seed.wrapping_add(record.id),
                ..config.clone()
            };
            let outcome = solve(solver, &record.instance, &run_config)?;
            let oracle = record.oracle_cost();
            Ok(BenchRecord {
                instance_id: record.id,
                robots: record.instance.robots().len(),
                edges: record.instance.num_edges(),
                solver,
                objective: record.objective,
                cost: outcome.cost,
                oracle_cost: oracle,
                optimality_ratio: oracle.map(|o| optimality_ratio(o, outcome.cost)),
                wall_time_s: outcome.stats.wall_time_s.max(1e-9),
                samples_used: outcome.stats.evaluations,
                ratio_kind: oracle.map(|_| RatioKind::Oracle),
                incomplete: outcome.stats.incomplete,
            })
        })
        .collect::<Result<_>>()?;

    let per_instance = solvers.len().max(1);
    for (i, chunk) in out.chunks_mut(per_instance).enumerate() {
        if dataset[i].oracle_cost().is_some() {
            continue;
        }
        let best = chunk
            .iter()
            .map(|r| r.cost)
            .chain(dataset[i].reference_cost())
            .fold(f64::INFINITY, f64::min);
        for r in chunk {
            r.optimality_ratio = Some(optimality_ratio(best, r.cost));
            r.ratio_kind = Some(RatioKind::RelativeRatio);
        }
    }
    Ok(out)
}

pub fn write_bench_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bench_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .enumerate()
        .map(|(k, row)| {
            row.map_err(|e| Error::Parse {
                line: k + 2,
                record: k,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTiming {
    pub index: usize,
    pub decode_s: f64,
    pub evaluate_s: f64,
    pub cost: f64,
    /// Lowest cost among samples `0..=index`.
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEval {
    pub best: Assignment,
    pub cost: f64,
    pub best_index: usize,
    pub per_sample: Vec<SampleTiming>,
}

impl SampleEval {
    pub fn samples_used(&self) -> usize {
        self.per_sample.len()
    }

    /// Lowest cost among the first `n` samples.
    pub fn best_of_first(&self, n: usize) -> Option<f64> {
        n.checked_sub(1)
            .and_then(|k| self.per_sample.get(k.min(self.per_sample.len().saturating_sub(1))))
            .map(|t| t.best_so_far)
    }

    pub fn total_decode_s(&self) -> f64 {
        self.per_sample.iter().map(|t| t.decode_s).sum()
    }

    pub fn total_evaluate_s(&self) -> f64 {
        self.per_sample.iter().map(|t| t.evaluate_s).sum()
    }
}

/// Decodes and scores the first `n` samples and keeps the cheapest
/// (first one on ties).
pub fn eval_samples(instance: &ProblemInstance, samples: &[BidSample], objective: Objective, n: usize) -> Result<SampleEval> {
    if n == 0 || samples.is_empty() {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let events = instance.events();
    let mut per_sample = Vec::with_capacity(n.min(samples.len()));
    let mut best: Option<(Assignment, f64, usize)> = None;
    for (index, sample) in samples.iter().take(n).enumerate() {
        let t0 = Instant::now();
        let assignment = decode(instance, sample)?;
        let t1 = Instant::now();
        let cost = events.summarize_assignment(&assignment)?.cost(objective);
        let t2 = Instant::now();
        if best.as_ref().is_none_or(|(_, c, _)| cost < *c) {
            best = Some((assignment, cost, index));
        }
        per_sample.push(SampleTiming {
            index,
            decode_s: (t1 - t0).as_secs_f64(),
            evaluate_s: (t2 - t1).as_secs_f64(),
            cost,
            best_so_far: best.as_ref().map_or(cost, |b| b.1),
        });
    }
    let (best, cost, best_index) = best.expect("non-empty");
    Ok(SampleEval {
        best,
        cost,
        best_index,
        per_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_dataset, GenParams};
    use crate::model::fixtures;
    use crate::solvers::random_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dataset(n: usize) -> Vec<DatasetRecord> {
        let params = GenParams {
            robots_max: 5,
            sections_max: 6,
            seed: 3,
            ..GenParams::default()
        };
        gen_dataset(&params, n, &SolverConfig::default(), 14).unwrap()
    }

    #[test]
    fn exact_scores_one_against_itself() {
        let records = bench(&dataset(8), &[SolverKind::Exact, SolverKind::Random], &SolverConfig::default()).unwrap();
        assert_eq!(records.len(), 16);
        for r in &records {
            assert_eq!(r.ratio_kind, Some(RatioKind::Oracle));
            let ratio = r.optimality_ratio.unwrap();
            assert!(ratio > 0.0 && ratio <= 1.0);
            if r.solver == SolverKind::Exact {
                assert_eq!(ratio, 1.0);
            }
            assert!(r.wall_time_s > 0.0);
        }
    }

    #[test]
    fn heuristic_references_give_relative_ratios() {
        let mut data = dataset(2);
        for r in &mut data {
            r.source = Some(crate::instances::HEURISTIC_REFERENCE.into());
        }
        let records = bench(&data, &[SolverKind::Fcfs, SolverKind::Tabu], &SolverConfig::default()).unwrap();
        for r in &records {
            assert_eq!(r.oracle_cost, None);
            assert_eq!(r.ratio_kind, Some(RatioKind::RelativeRatio));
            assert!(r.optimality_ratio.unwrap() <= 1.0);
        }
    }

    #[test]
    fn csv_round_trip() {
        let records = bench(&dataset(3), &SolverKind::ALL, &SolverConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bench.csv");
        write_bench_csv(&records, &p).unwrap();
        assert_eq!(read_bench_csv(&p).unwrap(), records);
        let header = std::fs::read_to_string(&p).unwrap();
        assert!(header.starts_with(
            "instance_id,robots,edges,solver,objective,cost,oracle_cost,optimality_ratio,wall_time_s,samples_used"
        ));
    }

    #[test]
    fn sample_prefix_minimum_is_nonincreasing() {
        let inst = fixtures::triangle(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples: Vec<BidSample> = (0..50).map(|_| random_sample(&inst, &mut rng)).collect();
        let all = eval_samples(&inst, &samples, Objective::Avg, 100).unwrap();
        assert_eq!(all.samples_used(), 50);
        for w in all.per_sample.windows(2) {
            assert!(w[1].best_so_far <= w[0].best_so_far);
        }
        let one = eval_samples(&inst, &samples, Objective::Avg, 1).unwrap();
        assert_eq!(one.cost, all.per_sample[0].cost);
        assert!(all.cost <= one.cost);
        assert_eq!(all.best_of_first(1), Some(one.cost));
    }

    #[test]
    fn sample_dimension_mismatch_is_reported() {
        let inst = fixtures::triangle(2);
        let bad = BidSample::new(vec![1.0], vec![]);
        match eval_samples(&inst, &[bad], Objective::Avg, 1) {
            Err(Error::DimensionMismatch {
                expected_nodes,
                expected_edges,
                ..
            }) => {
                assert_eq!(expected_nodes, inst.num_nodes());
                assert_eq!(expected_edges, 3);
            }
            other => panic!("{other:?}"),
        }
    }
}
