//! Lloyd's K-means baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{
    assign_nearest, nearest_center, sample_distinct_pixels, validate_config, CenterSet,
    ClusterConfig, Labeling, PixelDataset,
};

pub const KMEANS_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KmeansResult {
    pub centers: CenterSet,
    pub labels: Labeling,
    /// Within-cluster sum of squares after each assignment step.
    pub sse_trajectory: Vec<f64>,
    pub iterations: usize,
}

impl KmeansResult {
    pub fn final_sse(&self) -> f64 {
        self.sse_trajectory.last().copied().unwrap_or(0.0)
    }
}

/// Seeds `C` distinct pixel colors from `config.seed` and runs Lloyd
/// iterations until the labels stop changing.
pub fn run_kmeans(dataset: &PixelDataset, config: &ClusterConfig) -> Result<KmeansResult> {
    let config = validate_config(config.clone(), dataset)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = sample_distinct_pixels(dataset, config.clusters, &mut rng)?;
    lloyd(dataset, init)
}

/// Lloyd iterations from explicit starting centers.
pub fn lloyd(dataset: &PixelDataset, mut centers: CenterSet) -> Result<KmeansResult> {
    let c = centers.len();
    let d = dataset.dim();
    let mut labels = assign_nearest(dataset, &centers)?;
    let mut sse_trajectory = vec![sse(dataset, &centers, &labels)];
    let mut iterations = 0;

    while iterations < KMEANS_MAX_ITERS {
        let mut sums = vec![0.0; c * d];
        let mut counts = vec![0usize; c];
        for (p, &l) in dataset.points().zip(labels.as_slice()) {
            counts[l] += 1;
            for (s, x) in sums[l * d..(l + 1) * d].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut next = centers.clone();
        for k in 0..c {
            if counts[k] > 0 {
                for (dst, s) in next.center_mut(k).iter_mut().zip(&sums[k * d..(k + 1) * d]) {
                    *dst = s / counts[k] as f64;
                }
            }
        }
        // empty clusters move to the pixel worst served by the updated centers
        for k in (0..c).filter(|&k| counts[k] == 0) {
            let mut far = (0, f64::NEG_INFINITY);
            for (i, p) in dataset.points().enumerate() {
                let dist = nearest_center(p, &next).1;
                if dist > far.1 {
                    far = (i, dist);
                }
            }
            next.center_mut(k).copy_from_slice(dataset.point(far.0));
        }
        next.clamp_to_color_range();
        centers = next;
        iterations += 1;

        let new_labels = assign_nearest(dataset, &centers)?;
        sse_trajectory.push(sse(dataset, &centers, &new_labels));
        let unchanged = new_labels == labels;
        labels = new_labels;
        if unchanged {
            break;
        }
    }

    Ok(KmeansResult { centers, labels, sse_trajectory, iterations })
}

fn sse(dataset: &PixelDataset, centers: &CenterSet, labels: &Labeling) -> f64 {
    dataset
        .points()
        .zip(labels.as_slice())
        .map(|(p, &l)| crate::model::squared_distance(p, centers.center(l)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn every_pixel_its_own_center() {
        let ds = PixelDataset::from_scalars(&[3.0, 50.0, 77.0, 200.0]).unwrap();
        let r = run_kmeans(&ds, &ClusterConfig::new(4)).unwrap();
        assert_eq!(r.final_sse(), 0.0);
        let mut c = r.centers.into_vec();
        c.sort_by(f64::total_cmp);
        assert_eq!(c, vec![3.0, 50.0, 77.0, 200.0]);
    }

    #[test]
    fn two_blobs_reach_the_enumerated_optimum() {
        let values = [0.0, 1.0, 9.0, 10.0];
        // exhaustive search over all 2-partitions for the minimum SSE
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for mask in 1u32..(1 << values.len()) - 1 {
            let (a, b): (Vec<f64>, Vec<f64>) = (0..values.len())
                .map(|i| (mask >> i & 1 == 1, values[i]))
                .fold((vec![], vec![]), |(mut a, mut b), (left, v)| {
                    if left { a.push(v) } else { b.push(v) }
                    (a, b)
                });
            let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
            let (ma, mb) = (mean(&a), mean(&b));
            let cost: f64 = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>()
                + b.iter().map(|x| (x - mb).powi(2)).sum::<f64>();
            if cost < best.0 {
                best = (cost, ma.min(mb), ma.max(mb));
            }
        }
        let ds = PixelDataset::from_scalars(&values).unwrap();
        for seed in 0..10 {
            let r = run_kmeans(&ds, &ClusterConfig::new(2).with_seed(seed)).unwrap();
            let mut c = r.centers.into_vec();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![best.1, best.2]);
            assert_eq!(c, vec![0.5, 9.5]);
        }
    }

    #[test]
    fn identical_pixels_single_cluster() {
        let ds = PixelDataset::new([40.0, 80.0, 120.0].repeat(6), 3, 3, 2).unwrap();
        let r = run_kmeans(&ds, &ClusterConfig::new(1)).unwrap();
        assert_eq!(r.final_sse(), 0.0);
        assert_eq!(r.centers.as_slice(), &[40.0, 80.0, 120.0]);
    }

    #[test]
    fn too_many_clusters() {
        let ds = PixelDataset::from_scalars(&[1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            run_kmeans(&ds, &ClusterConfig::new(3)),
            Err(Error::TooManyClusters { requested: 3, distinct: 2 })
        ));
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        let ds = PixelDataset::from_scalars(&[0.0, 1.0, 9.0, 10.0]).unwrap();
        // the 200 center never receives a pixel
        let r = lloyd(&ds, CenterSet::from_scalars(&[0.0, 200.0, 5.0]).unwrap()).unwrap();
        assert!(r.labels.as_slice().contains(&1));
        let w = r.sse_trajectory.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
        assert!(w, "{:?}", r.sse_trajectory);
    }
}
