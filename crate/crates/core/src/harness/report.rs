use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BenchRecord;
use crate::error::Result;
use crate::schedule::Objective;
use crate::solvers::SolverKind;

/// Upper robot-count bounds of the scalability buckets.
pub const ROBOT_BUCKETS: [usize; 5] = [10, 25, 50, 100, 250];

fn bucket_of(robots: usize) -> usize {
    ROBOT_BUCKETS
        .into_iter()
        .find(|&b| robots <= b)
        .unwrap_or(ROBOT_BUCKETS[ROBOT_BUCKETS.len() - 1])
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub solver: SolverKind,
    pub objective: Objective,
    pub records: usize,
    /// Records that carry a ratio.
    pub rated: usize,
    pub mean_ratio: Option<f64>,
    pub p10_ratio: Option<f64>,
    pub p50_ratio: Option<f64>,
    pub p90_ratio: Option<f64>,
    pub mean_cost: f64,
    pub mean_time_s: f64,
    pub p50_time_s: f64,
    pub p90_time_s: f64,
    pub incomplete: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub solver: SolverKind,
    pub objective: Objective,
    /// Robot-count upper bound of the bucket.
    pub bucket: usize,
    pub records: usize,
    pub mean_robots: f64,
    pub mean_edges: f64,
    pub mean_ratio: Option<f64>,
    pub mean_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub solvers: Vec<SolverSummary>,
    pub buckets: Vec<BucketSummary>,
}

/// Aggregates records per (solver, objective) and per robot bucket, in
/// order of first appearance.
pub fn report(records: &[BenchRecord]) -> Report {
    let mut keys: Vec<(SolverKind, Objective)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.solver, r.objective)) {
            keys.push((r.solver, r.objective));
        }
    }

    let mut solvers = Vec::new();
    let mut buckets = Vec::new();
    for (solver, objective) in keys {
        let group: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.solver == solver && r.objective == objective)
            .collect();
        let mut ratios: Vec<f64> = group.iter().filter_map(|r| r.optimality_ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let mut times: Vec<f64> = group.iter().map(|r| r.wall_time_s).collect();
        times.sort_by(f64::total_cmp);
        let costs: Vec<f64> = group.iter().map(|r| r.cost).collect();
        solvers.push(SolverSummary {
            solver,
            objective,
            records: group.len(),
            rated: ratios.len(),
            mean_ratio: mean(&ratios),
            p10_ratio: percentile(&ratios, 10.0),
            p50_ratio: percentile(&ratios, 50.0),
            p90_ratio: percentile(&ratios, 90.0),
            mean_cost: mean(&costs).unwrap_or(0.0),
            mean_time_s: mean(&times).unwrap_or(0.0),
            p50_time_s: percentile(&times, 50.0).unwrap_or(0.0),
            p90_time_s: percentile(&times, 90.0).unwrap_or(0.0),
            incomplete: group.iter().filter(|r| r.incomplete).count(),
        });

        for bucket in ROBOT_BUCKETS {
            let members: Vec<&&BenchRecord> = group.iter().filter(|r| bucket_of(r.robots) == bucket).collect();
            if members.is_empty() {
                continue;
            }
            let pick = |f: &dyn Fn(&BenchRecord) -> f64| mean(&members.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap_or(0.0);
            let ratios: Vec<f64> = members.iter().filter_map(|r| r.optimality_ratio).collect();
            buckets.push(BucketSummary {
                solver,
                objective,
                bucket,
                records: members.len(),
                mean_robots: pick(&|r| r.robots as f64),
                mean_edges: pick(&|r| r.edges as f64),
                mean_ratio: mean(&ratios),
                mean_time_s: pick(&|r| r.wall_time_s),
            });
        }
    }
    Report { solvers, buckets }
}

/// Writes `summary.csv` (ratio and runtime per solver) and `buckets.csv`
/// (per robot bucket) into `dir`.
pub fn write_report(report: &Report, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for s in &report.solvers {
        w.serialize(s)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("buckets.csv"))?;
    for b in &report.buckets {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{read_bench_csv, write_bench_csv, RatioKind};

    fn rec(id: u64, robots: usize, solver: SolverKind, cost: f64, oracle: Option<f64>) -> BenchRecord {
        BenchRecord {
            instance_id: id,
            robots,
            edges: robots * 2,
            solver,
            objective: Objective::Avg,
            cost,
            oracle_cost: oracle,
            optimality_ratio: oracle.map(|o| o / cost),
            wall_time_s: 0.01 * (id + 1) as f64,
            samples_used: 1,
            ratio_kind: oracle.map(|_| RatioKind::Oracle),
            incomplete: false,
        }
    }

    #[test]
    fn single_record_summary_is_the_record() {
        let r = rec(0, 4, SolverKind::Tabu, 8.0, Some(6.0));
        let rep = report(std::slice::from_ref(&r));
        let s = &rep.solvers[0];
        assert_eq!(s.records, 1);
        assert_eq!(s.mean_ratio, r.optimality_ratio);
        assert_eq!(s.p10_ratio, r.optimality_ratio);
        assert_eq!(s.p90_ratio, r.optimality_ratio);
        assert_eq!(s.mean_cost, 8.0);
        assert_eq!(s.mean_time_s, r.wall_time_s);
        assert_eq!(rep.buckets.len(), 1);
        assert_eq!(rep.buckets[0].bucket, 10);
    }

    #[test]
    fn buckets_by_robot_count() {
        let records: Vec<_> = [3, 12, 40, 90, 240, 400]
            .into_iter()
            .enumerate()
            .map(|(i, n)| rec(i as u64, n, SolverKind::Random, 10.0, None))
            .collect();
        let rep = report(&records);
        let got: Vec<usize> = rep.buckets.iter().map(|b| b.bucket).collect();
        assert_eq!(got, vec![10, 25, 50, 100, 250]);
        assert_eq!(rep.buckets[4].records, 2);
    }

    #[test]
    fn missing_oracle_is_not_fabricated() {
        let rep = report(&[rec(0, 4, SolverKind::Fcfs, 8.0, None)]);
        assert_eq!(rep.solvers[0].mean_ratio, None);
        assert_eq!(rep.solvers[0].rated, 0);
        assert_eq!(rep.buckets[0].mean_ratio, None);
    }

    #[test]
    fn csv_reimport_gives_identical_aggregates() {
        let records: Vec<_> = (0..30)
            .map(|i| {
                let solver = SolverKind::ALL[i % 6];
                rec(i as u64, 2 + i % 7, solver, 5.0 + (i as f64) / 7.0, (i % 4 != 0).then_some(5.0))
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.csv");
        write_bench_csv(&records, &p).unwrap();
        assert_eq!(report(&read_bench_csv(&p).unwrap()), report(&records));
        write_report(&report(&records), dir.path().join("out")).unwrap();
        assert!(dir.path().join("out/summary.csv").exists());
    }

    #[test]
    fn percentiles() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        assert_eq!(percentile(&xs, 10.0), Some(1.0));
        assert_eq!(percentile(&xs, 50.0), Some(5.0));
        assert_eq!(percentile(&xs, 90.0), Some(9.0));
        assert_eq!(percentile(&[], 50.0), None);
    }
}
