use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{assignment_cost, SolveOutcome, SolveStats, SolverConfig};
use crate::decoder::{decode, BidSample};
use crate::error::Result;
use crate::model::ProblemInstance;
use crate::schedule::Assignment;

const MIN_BID: f64 = 1e-6;

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Maps a genome of length `|V| + |A|` to a sample: softplus bids, raw scores.
fn genome_sample(instance: &ProblemInstance, x: &DVector<f64>) -> BidSample {
    let n = instance.num_nodes();
    let bids = x.iter().take(n).map(|&g| softplus(g) + MIN_BID).collect();
    let scores = x.iter().skip(n).copied().collect();
    BidSample::new(bids, scores)
}

/// CMA-ES over the decoder's continuous sample space.
pub fn solve_cmaes(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveOutcome> {
    config.check()?;
    let deadline = config.deadline();
    let dim = instance.num_nodes() + instance.num_edges();
    let mut stats = SolveStats::default();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut es = Strategy::new(dim, config.cmaes_population, config.cmaes_sigma0);
    let mut best: Option<(Assignment, f64)> = None;
    for _ in 0..config.cmaes_generations {
        if stats.expanded > 0 && deadline.expired() {
            stats.incomplete = true;
            break;
        }
        stats.expanded += 1;
        let population = es.ask(&mut rng);
        let mut fitness = Vec::with_capacity(population.len());
        for x in &population {
            let assignment = decode(instance, &genome_sample(instance, x))?;
            let cost = assignment_cost(instance, &assignment, config.objective)?;
            stats.evaluations += 1;
            if best.as_ref().is_none_or(|(_, c)| cost < *c) {
                best = Some((assignment, cost));
            }
            fitness.push(cost);
        }
        es.tell(&population, &fitness);
        if dim == 0 || es.sigma < 1e-12 {
            break;
        }
    }

    let (best, cost) = best.expect("at least one generation");
    stats.wall_time_s = deadline.elapsed();
    Ok(SolveOutcome {
        best,
        cost,
        top: Vec::new(),
        stats,
    })
}

/// (μ/μ_w, λ)-CMA-ES with rank-one and rank-μ updates and cumulative
/// step-size adaptation.
struct Strategy {
    dim: usize,
    lambda: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    cc: f64,
    cs: f64,
    c1: f64,
    cmu: f64,
    damps: f64,
    chi_n: f64,
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    basis: DMatrix<f64>,
    scale: DVector<f64>,
    pc: DVector<f64>,
    ps: DVector<f64>,
    generation: usize,
    eigen_generation: usize,
    last_z: Vec<DVector<f64>>,
}

impl Strategy {
    fn new(dim: usize, population: Option<usize>, sigma0: f64) -> Self {
        let n = dim.max(1) as f64;
        let lambda = population.unwrap_or(4 + (3.0 * n.ln()).floor() as usize).max(2);
        let mu = lambda / 2;
        let raw: Vec<f64> = (0..mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let cc = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let cs = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let c1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let cmu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        let damps = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        Self {
            dim,
            lambda,
            weights,
            mu_eff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
            mean: DVector::zeros(dim),
            sigma: sigma0,
            cov: DMatrix::identity(dim, dim),
            basis: DMatrix::identity(dim, dim),
            scale: DVector::from_element(dim, 1.0),
            pc: DVector::zeros(dim),
            ps: DVector::zeros(dim),
            generation: 0,
            eigen_generation: 0,
            last_z: Vec::new(),
        }
    }

    fn ask(&mut self, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
        self.last_z = (0..self.lambda)
            .map(|_| DVector::from_fn(self.dim, |_, _| StandardNormal.sample(rng)))
            .collect();
        self.last_z
            .iter()
            .map(|z| &self.mean + self.sigma * (&self.basis * z.component_mul(&self.scale)))
            .collect()
    }

    fn tell(&mut self, population: &[DVector<f64>], fitness: &[f64]) {
        if self.dim == 0 {
            return;
        }
        self.generation += 1;
        let n = self.dim as f64;
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
        let elite: Vec<usize> = order.into_iter().take(self.weights.len()).collect();

        let old_mean = self.mean.clone();
        let mut mean = DVector::zeros(self.dim);
        let mut zmean = DVector::zeros(self.dim);
        for (w, &i) in self.weights.iter().zip(&elite) {
            mean += *w * &population[i];
            zmean += *w * &self.last_z[i];
        }
        self.mean = mean;

        // C^{-1/2} (m' - m) / sigma = B z_mean
        let bz = &self.basis * &zmean;
        self.ps = (1.0 - self.cs) * &self.ps + (self.cs * (2.0 - self.cs) * self.mu_eff).sqrt() * bz;
        let ps_norm = self.ps.norm();
        let decay = 1.0 - (1.0 - self.cs).powi(2 * self.generation as i32);
        let hsig = ps_norm / decay.sqrt() / self.chi_n < 1.4 + 2.0 / (n + 1.0);
        let step = (&self.mean - &old_mean) / self.sigma;
        self.pc = (1.0 - self.cc) * &self.pc;
        if hsig {
            self.pc += (self.cc * (2.0 - self.cc) * self.mu_eff).sqrt() * &step;
        }

        let mut rank_mu = DMatrix::zeros(self.dim, self.dim);
        for (w, &i) in self.weights.iter().zip(&elite) {
            let y = (&population[i] - &old_mean) / self.sigma;
            rank_mu += *w * &y * y.transpose();
        }
        let correction = if hsig { 0.0 } else { self.c1 * self.cc * (2.0 - self.cc) };
        self.cov = (1.0 - self.c1 - self.cmu + correction) * &self.cov
            + self.c1 * &self.pc * self.pc.transpose()
            + self.cmu * rank_mu;

        self.sigma *= ((self.cs / self.damps) * (ps_norm / self.chi_n - 1.0)).exp();

        let lag = self.generation - self.eigen_generation;
        if lag as f64 > 1.0 / ((self.c1 + self.cmu) * n * 10.0) {
            self.eigen_generation = self.generation;
            self.refresh_eigen();
        }
    }

    fn refresh_eigen(&mut self) {
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        self.scale = eig.eigenvalues.map(|v| v.max(1e-20).sqrt());
        self.basis = eig.eigenvectors;
        self.cov = &self.basis * DMatrix::from_diagonal(&self.scale.map(|s| s * s)) * self.basis.transpose();
    }
}
