use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{merge_intervals, IntervalPair, ProblemInstance, RobotId};

/// Shortest and longest duration of one side of an interfering pair.
const SECTION_LEN: (f64, f64) = (1.0, 4.0);
/// Largest offset between the two robots' entry times in a pair.
const PARTNER_SHIFT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub robots_min: usize,
    pub robots_max: usize,
    pub sections_max: usize,
    /// Seconds.
    pub time_horizon: f64,
    pub density_choices: Vec<u32>,
    /// Probability that a new section is placed on top of an existing one
    /// of the same robot, so the two merge into one node.
    pub overlap_prob: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            robots_min: 2,
            robots_max: 8,
            sections_max: 14,
            time_horizon: 60.0,
            density_choices: vec![1, 2, 3],
            overlap_prob: 0.3,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParams(m));
        if self.robots_min < 2 || self.robots_min > self.robots_max {
            return fail(format!(
                "need 2 <= robots_min <= robots_max, got {}..{}",
                self.robots_min, self.robots_max
            ));
        }
        if self.sections_max == 0 {
            return fail("sections_max must be at least 1".into());
        }
        if !(self.time_horizon >= 2.0 * SECTION_LEN.1) || !self.time_horizon.is_finite() {
            return fail(format!(
                "time_horizon must be at least {}, got {}",
                2.0 * SECTION_LEN.1,
                self.time_horizon
            ));
        }
        if self.density_choices.is_empty() || self.density_choices.contains(&0) {
            return fail("density_choices must be non-empty and positive".into());
        }
        if !(0.0..=1.0).contains(&self.overlap_prob) {
            return fail(format!("overlap_prob must lie in [0, 1], got {}", self.overlap_prob));
        }
        Ok(())
    }
}

fn round_cs(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Generates the `index`-th instance of the stream seeded by `params.seed`.
pub fn gen_instance_indexed(params: &GenParams, index: u64) -> Result<ProblemInstance> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index);
    generate(params, &mut rng)
}

/// Generates one random instance; equal params give equal instances.
pub fn gen_instance(params: &GenParams) -> Result<ProblemInstance> {
    gen_instance_indexed(params, 0)
}

fn generate(params: &GenParams, rng: &mut ChaCha8Rng) -> Result<ProblemInstance> {
    let n = rng.random_range(params.robots_min..=params.robots_max);
    let cover = n.div_ceil(2).min(params.sections_max);
    let sections = rng.random_range(cover..=params.sections_max);

    // the first pairs walk a shuffled robot order so (almost) every robot
    // takes part; the rest pick partners at random
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut partners = Vec::with_capacity(sections);
    for k in 0..sections {
        let pair = if 2 * k + 1 < n {
            (order[2 * k], order[2 * k + 1])
        } else if 2 * k < n {
            let other = (order[2 * k] + 1 + rng.random_range(0..n - 1)) % n;
            (order[2 * k], other)
        } else {
            let i = rng.random_range(0..n);
            (i, (i + 1 + rng.random_range(0..n - 1)) % n)
        };
        partners.push(pair);
    }

    let horizon = params.time_horizon;
    let mut placed: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    let mut pairs = Vec::with_capacity(sections);
    for (i, j) in partners {
        let len_a = rng.random_range(SECTION_LEN.0..SECTION_LEN.1);
        let len_b = rng.random_range(SECTION_LEN.0..SECTION_LEN.1);
        let start_a = match placed[i].len() {
            k if k > 0 && rng.random_bool(params.overlap_prob) => {
                let (lo, hi) = placed[i][rng.random_range(0..k)];
                rng.random_range(lo..hi)
            }
            _ => rng.random_range(0.0..horizon - SECTION_LEN.1),
        }
        .min(horizon - len_a);
        let start_b = (start_a + rng.random_range(-PARTNER_SHIFT..=PARTNER_SHIFT)).clamp(0.0, horizon - len_b);
        let a = (round_cs(start_a), round_cs(start_a + len_a));
        let b = (round_cs(start_b), round_cs(start_b + len_b));
        placed[i].push(a);
        placed[j].push(b);
        pairs.push(IntervalPair::new(RobotId(i as u64), a, RobotId(j as u64), b));
    }

    let mut data = merge_intervals(&pairs, 1)?;
    // one density per connected component of the joint graph
    let components = components(data.nodes.len(), data.joints.iter().map(|e| (e.a.index(), e.b.index())));
    let mut rho_of = vec![None; data.nodes.len()];
    for node in &mut data.nodes {
        let c = components[node.id.index()];
        let rho = *rho_of[c].get_or_insert_with(|| params.density_choices[rng.random_range(0..params.density_choices.len())]);
        node.density = rho;
    }
    ProblemInstance::new(data)
}

/// Component label of every node, labelled in order of first appearance.
pub(crate) fn components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[v] = label[r];
    }
    out
}
