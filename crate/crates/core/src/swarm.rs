//! Particle swarm search over candidate center sets.
//!
//! Each particle's position is a flattened `C x d` center set and its fitness
//! is the quantization error of the image against those centers (lower is
//! better). Two update rules are supported:
//!
//! * [`SwarmMode::Classic`]: constant inertia and equal constant learning
//!   factors.
//! * [`SwarmMode::Adaptive`]: per-particle inertia derived from where the
//!   particle's fitness sits between the swarm minimum and average, plus
//!   learning factors that move linearly from a cognitive-heavy to a
//!   social-heavy setting over `n_max` iterations.
//!
//! The search stops once the spread of particle fitnesses, relative to their
//! mean, falls under `variance_tol`, or after `n_max` iterations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    sample_distinct_pixels, squared_distance, validate_config, CenterSet, ClusterConfig,
    PixelDataset, COLOR_MAX, EPS_ZERO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwarmMode {
    Classic,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub n_max: usize,
    pub w_max: f64,
    pub w_min: f64,
    pub c1_init: f64,
    pub c1_final: f64,
    pub c2_init: f64,
    pub c2_final: f64,
    /// Inertia used in classic mode.
    pub constant_w: f64,
    /// Both learning factors in classic mode.
    pub constant_c: f64,
    pub variance_tol: f64,
    /// Velocity bound as a fraction of the color range.
    pub v_max_fraction: f64,
    pub mode: SwarmMode,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            n_max: 100,
            w_max: 0.9,
            w_min: 0.4,
            c1_init: 2.5,
            c1_final: 0.5,
            c2_init: 0.5,
            c2_final: 2.5,
            constant_w: 0.7,
            constant_c: 2.0,
            variance_tol: 1e-3,
            v_max_fraction: 0.2,
            mode: SwarmMode::Adaptive,
        }
    }
}

impl SwarmConfig {
    pub fn adaptive() -> Self {
        Self::default()
    }

    pub fn classic() -> Self {
        Self { mode: SwarmMode::Classic, ..Self::default() }
    }

    pub fn with_mode(mut self, mode: SwarmMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidSwarmConfig(msg.into()));
        if self.swarm_size == 0 {
            return fail("swarm_size must be positive");
        }
        if self.n_max == 0 {
            return fail("n_max must be positive");
        }
        let reals = [
            self.w_max,
            self.w_min,
            self.c1_init,
            self.c1_final,
            self.c2_init,
            self.c2_final,
            self.constant_w,
            self.constant_c,
            self.variance_tol,
            self.v_max_fraction,
        ];
        if reals.iter().any(|v| !v.is_finite()) {
            return fail("parameters must be finite");
        }
        if !(self.v_max_fraction > 0.0 && self.v_max_fraction <= 1.0) {
            return fail("v_max_fraction must lie in (0, 1]");
        }
        if self.variance_tol < 0.0 {
            return fail("variance_tol must be non-negative");
        }
        if self.mode == SwarmMode::Adaptive {
            if self.w_max < self.w_min {
                return fail("w_max must not be below w_min");
            }
            if self.c1_init < self.c2_init || self.c1_final > self.c2_final {
                return fail("learning schedule must start cognitive-heavy and end social-heavy");
            }
        }
        Ok(())
    }

    pub fn v_max(&self) -> f64 {
        self.v_max_fraction * COLOR_MAX
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest: Vec<f64>,
    pub pbest_fitness: f64,
    pub fitness: f64,
}

impl Particle {
    /// A particle at rest at `position`, with that position as its personal best.
    pub fn at_rest(dataset: &PixelDataset, position: Vec<f64>) -> Self {
        let fitness = particle_fitness(dataset, &position);
        Self {
            velocity: vec![0.0; position.len()],
            pbest: position.clone(),
            pbest_fitness: fitness,
            fitness,
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub gbest: Vec<f64>,
    pub gbest_fitness: f64,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmStats {
    pub f_avg: f64,
    pub f_min: f64,
    pub variance: f64,
}

impl SwarmStats {
    /// Variance scaled by the squared mean fitness.
    pub fn relative_variance(&self) -> f64 {
        self.variance / (self.f_avg * self.f_avg).max(EPS_ZERO)
    }
}

/// Inertia, cognitive and social coefficients for one particle move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub gbest_fitness: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmOutcome {
    pub best_centers: CenterSet,
    pub best_fitness: f64,
    /// One record per stats check, starting with the initial swarm.
    pub history: Vec<IterationRecord>,
    /// Number of swarm moves performed.
    pub iterations: usize,
    pub converged: bool,
}

/// Quantization error of the flattened center set `position`.
pub fn particle_fitness(dataset: &PixelDataset, position: &[f64]) -> f64 {
    let d = dataset.dim();
    debug_assert!(!position.is_empty() && position.len().is_multiple_of(d));
    dataset
        .points()
        .map(|p| {
            position
                .chunks_exact(d)
                .map(|c| squared_distance(p, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Mean, minimum and population variance of the particle fitnesses.
pub fn swarm_stats(fitnesses: &[f64]) -> Result<SwarmStats> {
    if fitnesses.is_empty() {
        return Err(Error::InvalidArgument("swarm statistics of an empty swarm".into()));
    }
    let s = fitnesses.len() as f64;
    let f_avg = fitnesses.iter().sum::<f64>() / s;
    let f_min = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
    let variance = fitnesses.iter().map(|f| (f - f_avg) * (f - f_avg)).sum::<f64>() / s;
    Ok(SwarmStats { f_avg, f_min, variance })
}

/// Fitness-driven inertia: `w_max` below the swarm average, otherwise scaled
/// by the particle's position between the swarm minimum and average, clamped
/// to `[w_min, w_max]`.
pub fn adaptive_inertia(f_i: f64, stats: &SwarmStats, config: &SwarmConfig) -> f64 {
    let spread = stats.f_avg - stats.f_min;
    if f_i < stats.f_avg || !(spread >= EPS_ZERO) {
        return config.w_max;
    }
    let raw = (config.w_max - config.w_min) * (f_i - stats.f_min) / spread;
    if raw.is_nan() {
        return config.w_max;
    }
    raw.clamp(config.w_min, config.w_max)
}

/// Linear learning-factor schedule at iteration `n` of `n_max`.
pub fn adaptive_learning_factors(n: usize, config: &SwarmConfig) -> (f64, f64) {
    let t = n as f64 / config.n_max as f64;
    // two-weight form so both endpoints are reproduced exactly
    let lerp = |from: f64, to: f64| (1.0 - t) * from + t * to;
    (lerp(config.c1_init, config.c1_final), lerp(config.c2_init, config.c2_final))
}

/// Velocity then position update with explicit random factors. Velocities are
/// clamped to `±v_max`, positions to the color range.
pub fn move_particle(
    particle: &mut Particle,
    gbest: &[f64],
    coeffs: Coefficients,
    r1: f64,
    r2: f64,
    v_max: f64,
) {
    let Coefficients { inertia, cognitive, social } = coeffs;
    for (((x, v), p), g) in particle
        .position
        .iter_mut()
        .zip(particle.velocity.iter_mut())
        .zip(&particle.pbest)
        .zip(gbest)
    {
        let nv = inertia * *v + cognitive * r1 * (p - *x) + social * r2 * (g - *x);
        *v = nv.clamp(-v_max, v_max);
        *x = (*x + *v).clamp(0.0, COLOR_MAX);
    }
}

/// Re-evaluates fitness at the current position and records a new personal
/// best when it improves strictly.
pub fn evaluate_particle(particle: &mut Particle, dataset: &PixelDataset) {
    particle.fitness = particle_fitness(dataset, &particle.position);
    if particle.fitness < particle.pbest_fitness {
        particle.pbest_fitness = particle.fitness;
        particle.pbest.copy_from_slice(&particle.position);
    }
}

/// One full particle step: draws `r1` then `r2` from `rng`, moves, evaluates.
pub fn step_particle<R: Rng + ?Sized>(
    particle: &mut Particle,
    gbest: &[f64],
    coeffs: Coefficients,
    v_max: f64,
    rng: &mut R,
    dataset: &PixelDataset,
) {
    let r1: f64 = rng.gen();
    let r2: f64 = rng.gen();
    move_particle(particle, gbest, coeffs, r1, r2, v_max);
    evaluate_particle(particle, dataset);
}

/// A running swarm bound to one dataset.
pub struct Swarm<'a> {
    dataset: &'a PixelDataset,
    config: SwarmConfig,
    state: SwarmState,
    rng: ChaCha8Rng,
}

impl<'a> Swarm<'a> {
    /// Initializes every particle on `C` distinct pixel colors drawn from the
    /// seeded generator, in particle order.
    pub fn new(dataset: &'a PixelDataset, config: &ClusterConfig, sconfig: &SwarmConfig) -> Result<Self> {
        let config = validate_config(config.clone(), dataset)?;
        sconfig.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut positions = Vec::with_capacity(sconfig.swarm_size);
        for _ in 0..sconfig.swarm_size {
            positions.push(sample_distinct_pixels(dataset, config.clusters, &mut rng)?.into_vec());
        }
        Self::assemble(dataset, positions, sconfig, rng)
    }

    /// Starts from explicit flattened positions; `seed` drives the moves.
    pub fn from_positions(
        dataset: &'a PixelDataset,
        positions: Vec<Vec<f64>>,
        sconfig: &SwarmConfig,
        seed: u64,
    ) -> Result<Self> {
        sconfig.validate()?;
        let d = dataset.dim();
        let len = positions.first().map_or(0, Vec::len);
        if positions.is_empty()
            || len == 0
            || !len.is_multiple_of(d)
            || positions.iter().any(|p| p.len() != len || p.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidArgument("positions must be equal-length center sets".into()));
        }
        let sconfig = SwarmConfig { swarm_size: positions.len(), ..sconfig.clone() };
        Self::assemble(dataset, positions, &sconfig, ChaCha8Rng::seed_from_u64(seed))
    }

    fn assemble(
        dataset: &'a PixelDataset,
        positions: Vec<Vec<f64>>,
        sconfig: &SwarmConfig,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        let particles: Vec<Particle> =
            positions.into_par_iter().map(|p| Particle::at_rest(dataset, p)).collect();
        let mut state = SwarmState {
            gbest: particles[0].pbest.clone(),
            gbest_fitness: particles[0].pbest_fitness,
            particles,
            iteration: 0,
        };
        refresh_gbest(&mut state);
        Ok(Self { dataset, config: sconfig.clone(), state, rng })
    }

    pub fn state(&self) -> &SwarmState {
        &self.state
    }

    pub fn stats(&self) -> SwarmStats {
        let fitnesses: Vec<f64> = self.state.particles.iter().map(|p| p.fitness).collect();
        swarm_stats(&fitnesses).expect("swarm is never empty")
    }

    fn coefficients(&self, particle: &Particle, stats: &SwarmStats) -> Coefficients {
        match self.config.mode {
            SwarmMode::Classic => Coefficients {
                inertia: self.config.constant_w,
                cognitive: self.config.constant_c,
                social: self.config.constant_c,
            },
            SwarmMode::Adaptive => {
                let (cognitive, social) = adaptive_learning_factors(self.state.iteration, &self.config);
                Coefficients {
                    inertia: adaptive_inertia(particle.fitness, stats, &self.config),
                    cognitive,
                    social,
                }
            }
        }
    }

    /// Moves every particle once. Random factors are drawn sequentially in
    /// particle order before the (parallel) moves.
    pub fn advance(&mut self) {
        let stats = self.stats();
        let coeffs: Vec<Coefficients> =
            self.state.particles.iter().map(|p| self.coefficients(p, &stats)).collect();
        let rng = &mut self.rng;
        let plan: Vec<(Coefficients, f64, f64)> = coeffs
            .into_iter()
            .map(|c| {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                (c, r1, r2)
            })
            .collect();
        let v_max = self.config.v_max();
        let gbest = &self.state.gbest;
        let dataset = self.dataset;
        self.state
            .particles
            .par_iter_mut()
            .zip(plan.par_iter())
            .for_each(|(particle, &(coeffs, r1, r2))| {
                move_particle(particle, gbest, coeffs, r1, r2, v_max);
                evaluate_particle(particle, dataset);
            });
        self.state.iteration += 1;
        refresh_gbest(&mut self.state);
    }

    pub fn run(mut self) -> Result<SwarmOutcome> {
        let mut history = Vec::new();
        let converged = loop {
            let stats = self.stats();
            history.push(IterationRecord {
                gbest_fitness: self.state.gbest_fitness,
                variance: stats.variance,
            });
            if stats.relative_variance() <= self.config.variance_tol {
                break true;
            }
            if self.state.iteration >= self.config.n_max {
                break false;
            }
            self.advance();
        };
        let mut best_centers = CenterSet::new(self.state.gbest.clone(), self.dataset.dim())?;
        best_centers.clamp_to_color_range();
        Ok(SwarmOutcome {
            best_centers,
            best_fitness: self.state.gbest_fitness,
            history,
            iterations: self.state.iteration,
            converged,
        })
    }
}

fn refresh_gbest(state: &mut SwarmState) {
    for p in &state.particles {
        if p.pbest_fitness < state.gbest_fitness {
            state.gbest_fitness = p.pbest_fitness;
            state.gbest.clone_from(&p.pbest);
        }
    }
}

/// Runs the swarm from a seeded random initialization.
pub fn run_swarm(
    dataset: &PixelDataset,
    config: &ClusterConfig,
    sconfig: &SwarmConfig,
) -> Result<SwarmOutcome> {
    Swarm::new(dataset, config, sconfig)?.run()
}
