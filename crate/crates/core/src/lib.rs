//! Color image segmentation by fuzzy c-means seeded from an adaptive particle
//! swarm, with K-means, plain FCM and classic-swarm baselines.
//!
//! ```no_run
//! use apsof::{imaging, pipeline::Algorithm, ClusterConfig, SwarmConfig};
//!
//! let bytes = std::fs::read("photo.ppm").unwrap();
//! let dataset = imaging::to_dataset(&imaging::load_ppm(&bytes).unwrap(), Some(128)).unwrap();
//! let result = Algorithm::Apsof
//!     .run(&dataset, &ClusterConfig::new(6), &SwarmConfig::default())
//!     .unwrap();
//! let out = imaging::reconstruct_quantized(&dataset, &result.labels, &result.centers).unwrap();
//! std::fs::write("segmented.ppm", imaging::write_ppm(&out)).unwrap();
//! ```

// `!(x <= y)` is how NaN is made to fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fcm;
pub mod imaging;
pub mod kmeans;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod swarm;

pub use error::{Error, PpmError, Result};
pub use model::{CenterSet, ClusterConfig, Labeling, MembershipMatrix, PixelDataset};
pub use swarm::{SwarmConfig, SwarmMode};
