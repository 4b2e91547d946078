//! Real-coded genetic algorithm over a box of membership values.
//!
//! The fitness of a chromosome is its ANSF score; the search maximizes it by
//! minimizing the negated score. Each generation keeps the elite unchanged
//! and fills the rest through stochastic universal sampling, single-point
//! crossover and per-gene mutation.
//!
//! # Determinism
//!
//! A run owns one ChaCha8 stream seeded from `GaConfig::rng_seed`. Draws are
//! consumed in this order, and nothing else touches the stream:
//!
//! 1. initial population, chromosome by chromosome, gene by gene (one
//!    uniform draw per gene);
//! 2. per generation: one SUS offset, then a Fisher-Yates shuffle of the
//!    selected parents;
//! 3. per parent pair: one crossover coin, one cut point if crossing, then
//!    for each child and each gene one mutation coin plus one draw when the
//!    gene mutates. Both children are always mutated, even when only one is
//!    kept.

use crate::ahp::WeightVector;
use crate::ansf::{weighted_sum, AnsfError, CriterionBounds};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

pub type GaRng = ChaCha8Rng;

/// Improvements smaller than this do not reset the stall counter.
pub const STALL_EPSILON: f64 = 1e-9;
const SHIFT_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("invalid bounds: {0}")]
    Bounds(String),
    #[error("invalid GA configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ansf(#[from] AnsfError),
}

pub fn rng_from_seed(seed: u64) -> GaRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feasible region `∏ [lower_j, upper_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GaError> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(GaError::Bounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite()) || l > u {
                return Err(GaError::Bounds(format!("gene {j}: lb {l} > ub {u}")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.dim()
            && genes
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(g, (l, u))| (*l..=*u).contains(g))
    }

    pub fn clamp(&self, genes: &mut [f64]) {
        for (g, (l, u)) in genes.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *g = g.clamp(*l, *u);
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }
}

impl From<&CriterionBounds> for SearchBox {
    fn from(b: &CriterionBounds) -> Self {
        Self {
            lower: b.lower(),
            upper: b.upper(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chromosome {
    pub genes: Vec<f64>,
}

impl Chromosome {
    pub fn new(genes: Vec<f64>) -> Self {
        Self { genes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationOperator {
    /// `gene + N(0, (scale · (ub − lb))²)`, clamped to the box.
    Gaussian { scale: f64 },
    /// Fresh uniform draw from `[lb, ub]`.
    UniformReset,
}

impl Default for MutationOperator {
    fn default() -> Self {
        Self::Gaussian { scale: 0.2 }
    }
}

/// How raw fitness becomes the SUS line lengths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessScaling {
    /// Raw fitness, shifted only when some value is not positive.
    #[default]
    Proportional,
    /// `1 / sqrt(rank)`, best rank 1.
    Rank,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub elite_count: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    pub max_generations: usize,
    /// Stop after this many generations without improvement; 0 disables.
    pub stall_generations: usize,
    pub rng_seed: u64,
    pub mutation: MutationOperator,
    pub scaling: FitnessScaling,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            elite_count: 2,
            crossover_prob: 0.8,
            mutation_prob: 0.01,
            max_generations: 200,
            stall_generations: 50,
            rng_seed: 0,
            mutation: MutationOperator::default(),
            scaling: FitnessScaling::default(),
        }
    }
}

impl GaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Every violated constraint, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.population_size < 2 {
            v.push(format!(
                "population_size must be >= 2, got {}",
                self.population_size
            ));
        }
        if self.elite_count >= self.population_size {
            v.push(format!(
                "elite_count {} must be below population_size {}",
                self.elite_count, self.population_size
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            v.push(format!(
                "crossover_prob {} outside [0, 1]",
                self.crossover_prob
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            v.push(format!(
                "mutation_prob {} outside [0, 1]",
                self.mutation_prob
            ));
        }
        if let MutationOperator::Gaussian { scale } = self.mutation {
            if !(scale.is_finite() && scale > 0.0) {
                v.push(format!(
                    "gaussian mutation scale must be positive, got {scale}"
                ));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<(), GaError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GaError::Config(v.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best: Chromosome,
    /// ANSF value of `best` (maximization convention).
    pub best_fitness: f64,
    /// Number of reproduction steps performed.
    pub generations_run: usize,
    /// Generation in which the last improvement above the stall epsilon happened.
    pub converged_at: usize,
    /// Best fitness of each evaluated generation, generation 0 first.
    pub history: Vec<f64>,
}

/// `config.population_size` chromosomes, each gene uniform in its interval.
pub fn init_population(
    bounds: &SearchBox,
    config: &GaConfig,
    rng: &mut GaRng,
) -> Result<Vec<Chromosome>, GaError> {
    config.validate()?;
    Ok((0..config.population_size)
        .map(|_| {
            let genes = bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(l, u)| l + rng.random::<f64>() * (u - l))
                .collect();
            Chromosome::new(genes)
        })
        .collect())
}

/// Rescales fitness (higher is better) into non-negative SUS line lengths.
pub fn scale_fitness(fitness: &[f64], scaling: FitnessScaling) -> Vec<f64> {
    match scaling {
        FitnessScaling::Proportional => fitness.to_vec(),
        FitnessScaling::Rank => {
            let order = order_best_first(fitness);
            let mut scaled = vec![0.0; fitness.len()];
            for (rank, &i) in order.iter().enumerate() {
                scaled[i] = 1.0 / ((rank + 1) as f64).sqrt();
            }
            scaled
        }
    }
}

/// Stochastic universal sampling: `count` equally spaced pointers with one
/// random offset over a line where individual `i` owns a segment of length
/// `fitness[i]`. Returns indices in line order.
///
/// When any fitness is not positive the line is shifted by `−min + ε`. A
/// zero or non-finite total falls back to uniform selection.
pub fn sus_select(fitness: &[f64], count: usize, rng: &mut GaRng) -> Vec<usize> {
    if fitness.is_empty() || count == 0 {
        return Vec::new();
    }
    let min = fitness.iter().cloned().fold(f64::INFINITY, f64::min);
    let lengths: Vec<f64> = if min <= 0.0 {
        fitness.iter().map(|f| f - min + SHIFT_EPSILON).collect()
    } else {
        fitness.to_vec()
    };
    let total: f64 = lengths.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return (0..count)
            .map(|_| rng.random_range(0..fitness.len()))
            .collect();
    }
    let step = total / count as f64;
    let start = rng.random::<f64>() * step;
    let mut chosen = Vec::with_capacity(count);
    let mut idx = 0;
    let mut edge = lengths[0];
    for k in 0..count {
        let pointer = start + k as f64 * step;
        while pointer >= edge && idx + 1 < lengths.len() {
            idx += 1;
            edge += lengths[idx];
        }
        chosen.push(idx);
    }
    chosen
}

/// Children swap gene suffixes from position `cut`.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    let cut = cut.min(a.genes.len());
    let mut c1 = a.genes[..cut].to_vec();
    c1.extend_from_slice(&b.genes[cut..]);
    let mut c2 = b.genes[..cut].to_vec();
    c2.extend_from_slice(&a.genes[cut..]);
    (Chromosome::new(c1), Chromosome::new(c2))
}

/// With probability `pc`, cut at a uniform point in `1..len` and swap
/// suffixes; otherwise copy. Children are clamped to `bounds`.
pub fn single_point_crossover(
    a: &Chromosome,
    b: &Chromosome,
    pc: f64,
    bounds: &SearchBox,
    rng: &mut GaRng,
) -> (Chromosome, Chromosome) {
    let len = a.genes.len().min(b.genes.len());
    let cross = rng.random::<f64>() < pc;
    let (mut c1, mut c2) = if cross && len >= 2 {
        let cut = rng.random_range(1..len);
        crossover_at(a, b, cut)
    } else {
        (a.clone(), b.clone())
    };
    bounds.clamp(&mut c1.genes);
    bounds.clamp(&mut c2.genes);
    (c1, c2)
}

/// Each gene mutates independently with probability `pm`.
pub fn mutate(
    mut c: Chromosome,
    pm: f64,
    bounds: &SearchBox,
    operator: MutationOperator,
    rng: &mut GaRng,
) -> Chromosome {
    for (j, gene) in c.genes.iter_mut().enumerate() {
        if rng.random::<f64>() >= pm {
            continue;
        }
        let (lo, hi) = (bounds.lower[j], bounds.upper[j]);
        let width = hi - lo;
        *gene = match operator {
            MutationOperator::UniformReset => lo + rng.random::<f64>() * width,
            MutationOperator::Gaussian { scale } => {
                let z: f64 = rng.sample(StandardNormal);
                *gene + z * scale * width
            }
        }
        .clamp(lo, hi);
    }
    c
}

fn order_best_first(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&i, &j| {
        fitness[j]
            .partial_cmp(&fitness[i])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });
    order
}

fn evaluate(weights: &WeightVector, population: &[Chromosome]) -> Result<Vec<f64>, GaError> {
    population
        .iter()
        .map(|c| weighted_sum(weights.as_slice(), &c.genes).map_err(GaError::from))
        .collect()
}

fn next_generation(
    population: &[Chromosome],
    fitness: &[f64],
    bounds: &SearchBox,
    config: &GaConfig,
    rng: &mut GaRng,
) -> Vec<Chromosome> {
    let ps = config.population_size;
    let order = order_best_first(fitness);
    let mut next: Vec<Chromosome> = order[..config.elite_count]
        .iter()
        .map(|&i| population[i].clone())
        .collect();

    let n_children = ps - config.elite_count;
    let mut parents = sus_select(&scale_fitness(fitness, config.scaling), n_children, rng);
    parents.shuffle(rng);

    let mut k = 0;
    while next.len() < ps {
        let a = &population[parents[k % parents.len()]];
        let b = &population[parents[(k + 1) % parents.len()]];
        k += 2;
        let (c1, c2) = single_point_crossover(a, b, config.crossover_prob, bounds, rng);
        let c1 = mutate(c1, config.mutation_prob, bounds, config.mutation, rng);
        let c2 = mutate(c2, config.mutation_prob, bounds, config.mutation, rng);
        next.push(c1);
        if next.len() < ps {
            next.push(c2);
        }
    }
    next
}

pub fn run_ga(
    weights: &WeightVector,
    bounds: &SearchBox,
    config: &GaConfig,
) -> Result<GaResult, GaError> {
    run_ga_observed(weights, bounds, config, |_, _| {})
}

/// [`run_ga`] with a callback seeing every evaluated generation.
pub fn run_ga_observed<F>(
    weights: &WeightVector,
    bounds: &SearchBox,
    config: &GaConfig,
    mut observe: F,
) -> Result<GaResult, GaError>
where
    F: FnMut(usize, &[Chromosome]),
{
    config.validate()?;
    if weights.len() != bounds.dim() {
        return Err(AnsfError::Dimension {
            expected: weights.len(),
            got: bounds.dim(),
        }
        .into());
    }
    let mut rng = rng_from_seed(config.rng_seed);
    let mut population = init_population(bounds, config, &mut rng)?;

    if bounds.is_degenerate() {
        observe(0, &population);
        let best = Chromosome::new(bounds.lower.clone());
        let best_fitness = weighted_sum(weights.as_slice(), &best.genes)?;
        return Ok(GaResult {
            best,
            best_fitness,
            generations_run: 0,
            converged_at: 0,
            history: vec![best_fitness],
        });
    }

    let mut history = Vec::with_capacity(config.max_generations + 1);
    let mut best: Option<(Chromosome, f64)> = None;
    let mut converged_at = 0;
    let mut stall = 0;
    let mut generation = 0;
    loop {
        let fitness = evaluate(weights, &population)?;
        observe(generation, &population);
        // Minimizing −f: the leader is the lowest objective, first index on ties.
        let objective: Vec<f64> = fitness.iter().map(|f| -f).collect();
        let leader = (0..objective.len())
            .min_by(|&i, &j| objective[i].total_cmp(&objective[j]).then(i.cmp(&j)))
            .expect("population is non-empty");
        let leader_fitness = fitness[leader];
        history.push(leader_fitness);

        match &best {
            Some((_, f)) if leader_fitness <= f + STALL_EPSILON => {
                stall += 1;
                if leader_fitness > *f {
                    best = Some((population[leader].clone(), leader_fitness));
                }
            }
            _ => {
                best = Some((population[leader].clone(), leader_fitness));
                converged_at = generation;
                stall = 0;
            }
        }

        let stalled = config.stall_generations > 0 && stall >= config.stall_generations;
        if generation >= config.max_generations || stalled {
            break;
        }
        population = next_generation(&population, &fitness, bounds, config, &mut rng);
        generation += 1;
    }

    let (best, best_fitness) = best.expect("at least one generation evaluated");
    Ok(GaResult {
        best,
        best_fitness,
        generations_run: generation,
        converged_at,
        history,
    })
}
