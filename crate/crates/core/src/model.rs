//! Domain types shared by every clustering engine.
//!
//! All point collections are stored flat (`N * dim` reals) so that the same
//! math serves RGB images (`dim == 3`) and the scalar (`dim == 1`) cases the
//! unit tests use.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Distances below this are treated as exact coincidence.
pub const EPS_ZERO: f64 = 1e-12;

/// Upper bound of a color component.
pub const COLOR_MAX: f64 = 255.0;

/// A flat collection of `dim`-dimensional color points laid out row-major over
/// a `width x height` raster.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelDataset {
    data: Vec<f64>,
    dim: usize,
    width: usize,
    height: usize,
}

impl PixelDataset {
    pub fn new(data: Vec<f64>, dim: usize, width: usize, height: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("point dimension must be positive".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "pixel buffer of length {} does not hold a positive number of {dim}-d points",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if width == 0 || height == 0 || width.checked_mul(height) != Some(n) {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height} raster does not match {n} pixels"
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > COLOR_MAX) {
            return Err(Error::InvalidArgument(format!(
                "pixel component {bad} outside [0, 255]"
            )));
        }
        Ok(Self { data, dim, width, height })
    }

    /// One-dimensional dataset laid out as a single row.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), 1, values.len(), 1)
    }

    /// Number of pixels, `N`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Number of distinct colors in the dataset.
    pub fn distinct_count(&self) -> usize {
        self.points().map(color_key).collect::<HashSet<_>>().len()
    }
}

/// `C` cluster prototypes, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    data: Vec<f64>,
    dim: usize,
}

impl CenterSet {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(
                "a center set needs at least one center of positive dimension".into(),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("center components must be finite".into()));
        }
        Ok(Self { data, dim })
    }

    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), 1)
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        if points.iter().any(|p| p.as_ref().len() != dim) {
            return Err(Error::InvalidArgument("centers of mixed dimension".into()));
        }
        Self::new(points.iter().flat_map(|p| p.as_ref().iter().copied()).collect(), dim)
    }

    /// Number of centers, `C`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub(crate) fn center_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Clamps every component into the color range.
    pub fn clamp_to_color_range(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, COLOR_MAX);
        }
    }

    /// Reorders centers so that output center `k` is input center `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() || order.iter().any(|&k| k >= self.len()) {
            return Err(Error::InvalidArgument("permutation does not match center count".into()));
        }
        Self::new(order.iter().flat_map(|&k| self.center(k).iter().copied()).collect(), self.dim)
    }

    pub(crate) fn check_compatible(&self, dataset: &PixelDataset) -> Result<()> {
        if self.dim != dataset.dim() {
            return Err(Error::InvalidArgument(format!(
                "centers are {}-d but pixels are {}-d",
                self.dim,
                dataset.dim()
            )));
        }
        Ok(())
    }
}

/// Row-major `N x C` fuzzy membership matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    u: Vec<f64>,
    clusters: usize,
}

impl MembershipMatrix {
    /// Builds a matrix after checking that entries lie in `[0, 1]` and every
    /// row sums to one within `1e-9`.
    pub fn new(u: Vec<f64>, clusters: usize) -> Result<Self> {
        if clusters == 0 || u.is_empty() || !u.len().is_multiple_of(clusters) {
            return Err(Error::InvalidArgument("membership shape is not N x C".into()));
        }
        for row in u.chunks_exact(clusters) {
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidArgument("membership outside [0, 1]".into()));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("membership row sums to {sum}")));
            }
        }
        Ok(Self { u, clusters })
    }

    pub(crate) fn from_raw(u: Vec<f64>, clusters: usize) -> Self {
        debug_assert_eq!(u.len() % clusters, 0);
        Self { u, clusters }
    }

    pub fn len(&self) -> usize {
        self.u.len() / self.clusters
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.clusters..(i + 1) * self.clusters]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.u.chunks_exact(self.clusters)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    /// Hard labels by maximum membership, lowest index on ties.
    pub fn argmax_labels(&self) -> Labeling {
        let labels = self
            .rows()
            .map(|row| {
                let mut best = 0;
                for (j, &v) in row.iter().enumerate().skip(1) {
                    if v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect();
        Labeling { labels, clusters: self.clusters }
    }
}

/// Hard cluster assignment, one index in `[0, C)` per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    clusters: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, clusters: usize) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&l| l >= clusters) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} out of range for {clusters} clusters"
            )));
        }
        Ok(Self { labels, clusters })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }
}

/// Parameters shared by every clustering algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub clusters: usize,
    pub fuzzifier: f64,
    pub fcm_max_iters: usize,
    pub fcm_rel_tol: f64,
    pub seed: u64,
}

impl ClusterConfig {
    pub fn new(clusters: usize) -> Self {
        Self { clusters, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the parameter invariants that do not depend on the data.
    pub fn check(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::InvalidClusterCount);
        }
        if !(self.fuzzifier > 1.0) || !self.fuzzifier.is_finite() {
            return Err(Error::InvalidFuzzifier(self.fuzzifier));
        }
        if self.fcm_max_iters == 0 {
            return Err(Error::InvalidArgument("fcm_max_iters must be positive".into()));
        }
        if !(self.fcm_rel_tol > 0.0) {
            return Err(Error::InvalidArgument("fcm_rel_tol must be positive".into()));
        }
        Ok(())
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self { clusters: 5, fuzzifier: 2.0, fcm_max_iters: 300, fcm_rel_tol: 1e-6, seed: 42 }
    }
}

/// Returns `config` unchanged when it is usable on `dataset`.
pub fn validate_config(config: ClusterConfig, dataset: &PixelDataset) -> Result<ClusterConfig> {
    config.check()?;
    let distinct = dataset.distinct_count();
    if config.clusters > distinct {
        return Err(Error::TooManyClusters { requested: config.clusters, distinct });
    }
    Ok(config)
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of and squared distance to the nearest center, lowest index on ties.
#[inline]
pub fn nearest_center(point: &[f64], centers: &CenterSet) -> (usize, f64) {
    let mut best = (0, squared_distance(point, centers.center(0)));
    for (k, c) in centers.iter().enumerate().skip(1) {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// Assigns every pixel to its nearest center.
pub fn assign_nearest(dataset: &PixelDataset, centers: &CenterSet) -> Result<Labeling> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no centers to assign to".into()));
    }
    centers.check_compatible(dataset)?;
    let labels = dataset
        .as_slice()
        .par_chunks_exact(dataset.dim())
        .map(|p| nearest_center(p, centers).0)
        .collect();
    Ok(Labeling { labels, clusters: centers.len() })
}

/// Quantization error: each pixel's squared distance to its nearest center.
pub fn quantization_error(dataset: &PixelDataset, centers: &CenterSet) -> f64 {
    dataset.points().map(|p| nearest_center(p, centers).1).sum()
}

fn color_key(p: &[f64]) -> Vec<u64> {
    // + 0.0 folds -0.0 into +0.0
    p.iter().map(|v| (v + 0.0).to_bits()).collect()
}

/// Picks `count` pixels with pairwise distinct colors.
///
/// Pixels are drawn uniformly by index and duplicates rejected. When the
/// image is dominated by few colors the rejection loop gives up after a
/// bounded number of misses and draws the remainder uniformly from the
/// not-yet-chosen distinct colors.
pub fn sample_distinct_pixels<R: Rng + ?Sized>(
    dataset: &PixelDataset,
    count: usize,
    rng: &mut R,
) -> Result<CenterSet> {
    if count == 0 {
        return Err(Error::InvalidClusterCount);
    }
    let n = dataset.len();
    let mut seen = HashSet::with_capacity(count);
    let mut chosen = Vec::with_capacity(count);
    let mut misses = 0;
    while chosen.len() < count && misses < 64 * count {
        let i = rng.gen_range(0..n);
        if seen.insert(color_key(dataset.point(i))) {
            chosen.push(i);
        } else {
            misses += 1;
        }
    }
    if chosen.len() < count {
        let mut remaining = Vec::new();
        for (i, p) in dataset.points().enumerate() {
            if seen.insert(color_key(p)) {
                remaining.push(i);
            }
        }
        let need = count - chosen.len();
        if remaining.len() < need {
            return Err(Error::TooManyClusters {
                requested: count,
                distinct: chosen.len() + remaining.len(),
            });
        }
        for k in rand::seq::index::sample(rng, remaining.len(), need) {
            chosen.push(remaining[k]);
        }
    }
    CenterSet::new(
        chosen.iter().flat_map(|&i| dataset.point(i).iter().copied()).collect(),
        dataset.dim(),
    )
}
