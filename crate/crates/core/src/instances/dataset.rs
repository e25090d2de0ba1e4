use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{gen_instance_indexed, GenParams};
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::schedule::Objective;
use crate::solvers::{solve_exact, solve_tabu, RankedAssignment, SolverConfig};

/// Source tag for optima that come from a heuristic rather than the exact
/// solver.
pub const HEURISTIC_REFERENCE: &str = "heuristic_reference";

/// One dataset line: an instance with its best known assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: u64,
    pub instance: ProblemInstance,
    pub objective: Objective,
    /// Ascending by cost.
    pub optima: Vec<RankedAssignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl DatasetRecord {
    /// The cost of the best optimum when it comes from the exact solver.
    pub fn oracle_cost(&self) -> Option<f64> {
        match self.source {
            None => self.optima.first().map(|r| r.cost),
            Some(_) => None,
        }
    }

    /// Best known cost, exact or heuristic.
    pub fn reference_cost(&self) -> Option<f64> {
        self.optima.first().map(|r| r.cost)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.optima.is_empty() {
            return Err("record has no optima".into());
        }
        if self.optima.windows(2).any(|w| w[0].cost > w[1].cost) {
            return Err("optima are not sorted by cost".into());
        }
        for r in &self.optima {
            r.assignment
                .check_len(&self.instance)
                .map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

/// Labels one instance: exact top-L when it has at most `exact_max_edges`
/// edges and finishes in time, tabu otherwise.
pub fn label_instance(
    id: u64,
    instance: ProblemInstance,
    config: &SolverConfig,
    exact_max_edges: usize,
) -> Result<DatasetRecord> {
    if instance.num_edges() <= exact_max_edges {
        let out = solve_exact(&instance, config)?;
        if !out.stats.incomplete {
            return Ok(DatasetRecord {
                id,
                instance,
                objective: config.objective,
                optima: out.top,
                source: None,
            });
        }
    }
    let out = solve_tabu(&instance, config)?;
    Ok(DatasetRecord {
        id,
        instance,
        objective: config.objective,
        optima: vec![RankedAssignment {
            assignment: out.best,
            cost: out.cost,
        }],
        source: Some(HEURISTIC_REFERENCE.into()),
    })
}

/// Generates and labels `count` instances in parallel. Record `k` uses
/// stream `k` of `params.seed`, so the output is independent of the thread
/// count.
pub fn gen_dataset(
    params: &GenParams,
    count: usize,
    config: &SolverConfig,
    exact_max_edges: usize,
) -> Result<Vec<DatasetRecord>> {
    params.check()?;
    config.check()?;
    (0..count as u64)
        .into_par_iter()
        .map(|k| label_instance(k, gen_instance_indexed(params, k)?, config, exact_max_edges))
        .collect()
}

pub fn export_dataset(records: &[DatasetRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a JSON Lines dataset. Blank lines are skipped; errors name the
/// 1-based line and 0-based record index.
pub fn import_dataset(path: impl AsRef<Path>) -> Result<Vec<DatasetRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |message: String| Error::Parse {
            line: k + 1,
            record: records.len(),
            message,
        };
        let record: DatasetRecord = serde_json::from_str(&line).map_err(|e| fail(e.to_string()))?;
        record.check().map_err(fail)?;
        records.push(record);
    }
    Ok(records)
}
