//! One entry point for the four segmentation algorithms.
//!
//! `apsof` is the adaptive swarm whose best center set seeds FCM; `psofcm`
//! does the same with a classic constant-coefficient swarm. `fcm` and
//! `kmeans` start from distinct pixel colors drawn with the same seeded
//! sampler the swarm uses for its particles.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fcm::{run_fcm, FcmResult};
use crate::kmeans::run_kmeans;
use crate::model::{sample_distinct_pixels, validate_config, CenterSet, ClusterConfig, Labeling, PixelDataset};
use crate::swarm::{run_swarm, SwarmConfig, SwarmMode, SwarmOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Kmeans,
    Fcm,
    PsoFcm,
    Apsof,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Kmeans, Algorithm::Fcm, Algorithm::PsoFcm, Algorithm::Apsof];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Kmeans => "kmeans",
            Algorithm::Fcm => "fcm",
            Algorithm::PsoFcm => "psofcm",
            Algorithm::Apsof => "apsof",
        }
    }

    pub fn run(
        self,
        dataset: &PixelDataset,
        config: &ClusterConfig,
        sconfig: &SwarmConfig,
    ) -> Result<SegmentationResult> {
        match self {
            Algorithm::Kmeans => timed(self, config.seed, || {
                let r = run_kmeans(dataset, config)?;
                Ok(Parts {
                    centers: r.centers.clone(),
                    labels: r.labels.clone(),
                    final_jm: r.final_sse(),
                    iterations: r.iterations,
                    swarm: None,
                    fcm: None,
                })
            }),
            Algorithm::Fcm => timed(self, config.seed, || {
                let config = validate_config(config.clone(), dataset)?;
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                let init = sample_distinct_pixels(dataset, config.clusters, &mut rng)?;
                let fcm = run_fcm(dataset, &init, &config)?;
                Ok(fcm_parts(fcm, None))
            }),
            Algorithm::PsoFcm => {
                swarm_then_fcm(self, dataset, config, &sconfig.clone().with_mode(SwarmMode::Classic))
            }
            Algorithm::Apsof => run_apsof(dataset, config, &sconfig.clone().with_mode(SwarmMode::Adaptive)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}` (expected kmeans, fcm, psofcm or apsof)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub algorithm: Algorithm,
    pub centers: CenterSet,
    pub labels: Labeling,
    /// Objective at convergence: J_m for the FCM family, SSE for K-means.
    pub final_jm: f64,
    /// Swarm moves plus FCM or Lloyd iterations.
    pub iterations: usize,
    pub swarm: Option<SwarmOutcome>,
    pub fcm: Option<FcmResult>,
    pub wall_time: Duration,
    pub seed: u64,
}

struct Parts {
    centers: CenterSet,
    labels: Labeling,
    final_jm: f64,
    iterations: usize,
    swarm: Option<SwarmOutcome>,
    fcm: Option<FcmResult>,
}

fn timed(algorithm: Algorithm, seed: u64, f: impl FnOnce() -> Result<Parts>) -> Result<SegmentationResult> {
    let start = Instant::now();
    let p = f()?;
    Ok(SegmentationResult {
        algorithm,
        centers: p.centers,
        labels: p.labels,
        final_jm: p.final_jm,
        iterations: p.iterations,
        swarm: p.swarm,
        fcm: p.fcm,
        wall_time: start.elapsed(),
        seed,
    })
}

fn fcm_parts(fcm: FcmResult, swarm: Option<SwarmOutcome>) -> Parts {
    Parts {
        centers: fcm.centers.clone(),
        labels: fcm.labels.clone(),
        final_jm: fcm.final_jm(),
        iterations: fcm.iterations + swarm.as_ref().map_or(0, |s| s.iterations),
        swarm,
        fcm: Some(fcm),
    }
}

fn swarm_then_fcm(
    algorithm: Algorithm,
    dataset: &PixelDataset,
    config: &ClusterConfig,
    sconfig: &SwarmConfig,
) -> Result<SegmentationResult> {
    timed(algorithm, config.seed, || {
        let swarm = run_swarm(dataset, config, sconfig)?;
        let fcm = run_fcm(dataset, &swarm.best_centers, config)?;
        Ok(fcm_parts(fcm, Some(swarm)))
    })
}

/// Adaptive swarm followed by FCM seeded with the swarm's best centers.
pub fn run_apsof(
    dataset: &PixelDataset,
    config: &ClusterConfig,
    sconfig: &SwarmConfig,
) -> Result<SegmentationResult> {
    if sconfig.mode != SwarmMode::Adaptive {
        return Err(Error::InvalidArgument("apsof requires the adaptive swarm mode".into()));
    }
    swarm_then_fcm(Algorithm::Apsof, dataset, config, sconfig)
}

/// Dispatches on an algorithm name: `kmeans`, `fcm`, `psofcm` or `apsof`.
pub fn run_algorithm(
    name: &str,
    dataset: &PixelDataset,
    config: &ClusterConfig,
    sconfig: &SwarmConfig,
) -> Result<SegmentationResult> {
    name.parse::<Algorithm>()?.run(dataset, config, sconfig)
}
