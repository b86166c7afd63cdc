#![allow(dead_code)]

use std::collections::HashMap;

use apsof::imaging::RawImage;
use apsof::PixelDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Colors pairwise at least 100 apart in every channel.
pub const BLOCK_COLORS: [[u8; 3]; 3] = [[20, 230, 120], [130, 20, 240], [240, 125, 10]];

/// Three solid vertical bands. Returns the image and its ground-truth labels.
pub fn three_block_image(width: usize, height: usize) -> (RawImage, Vec<usize>) {
    let mut bytes = Vec::with_capacity(width * height * 3);
    let mut truth = Vec::with_capacity(width * height);
    for _ in 0..height {
        for x in 0..width {
            let band = (3 * x / width).min(2);
            bytes.extend(BLOCK_COLORS[band]);
            truth.push(band);
        }
    }
    (RawImage::new(width, height, bytes).unwrap(), truth)
}

/// Pixels drawn from `blobs` isotropic Gaussians (sigma 10 per channel) with
/// means uniform in [30, 225]^3, each pixel picking a blob uniformly.
pub fn gaussian_blob_image(width: usize, height: usize, blobs: usize, seed: u64) -> RawImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<[f64; 3]> = (0..blobs)
        .map(|_| [0; 3].map(|_| rng.gen_range(30.0..225.0)))
        .collect();
    let noise = Normal::new(0.0, 10.0).unwrap();
    let mut bytes = Vec::with_capacity(width * height * 3);
    for _ in 0..width * height {
        let b = rng.gen_range(0..blobs);
        for mean in means[b] {
            let v: f64 = mean + noise.sample(&mut rng);
            bytes.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    RawImage::new(width, height, bytes).unwrap()
}

pub fn uniform_random_image(width: usize, height: usize, seed: u64) -> RawImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bytes = (0..width * height * 3).map(|_| rng.gen()).collect();
    RawImage::new(width, height, bytes).unwrap()
}

pub fn dataset(image: &RawImage) -> PixelDataset {
    apsof::imaging::to_dataset(image, None).unwrap()
}

/// True when `labels` equals `truth` up to a relabeling of clusters.
pub fn same_partition(labels: &[usize], truth: &[usize]) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    labels.len() == truth.len()
        && labels
            .iter()
            .zip(truth)
            .all(|(&l, &t)| *fwd.entry(l).or_insert(t) == t && *back.entry(t).or_insert(l) == l)
}

/// Scalar FCM by plain alternating optimization, written directly from the
/// ratio form of the membership rule and the weighted-mean center rule.
/// Runs until centers stop moving at machine precision.
pub fn oracle_scalar_fcm(x: &[f64], init: &[f64], m: f64) -> (Vec<f64>, f64) {
    let memberships = |c: &[f64]| -> Vec<Vec<f64>> {
        x.iter()
            .map(|&xi| {
                (0..c.len())
                    .map(|j| {
                        let dj = (xi - c[j]).abs();
                        if dj == 0.0 {
                            return 1.0;
                        }
                        if c.iter().any(|ck| (xi - ck).abs() == 0.0) {
                            return 0.0;
                        }
                        1.0 / c.iter().map(|ck| (dj / (xi - ck).abs()).powf(2.0 / (m - 1.0))).sum::<f64>()
                    })
                    .collect()
            })
            .collect()
    };
    let mut c = init.to_vec();
    for _ in 0..100_000 {
        let u = memberships(&c);
        let next: Vec<f64> = (0..c.len())
            .map(|j| {
                let num: f64 = x.iter().zip(&u).map(|(xi, row)| row[j].powf(m) * xi).sum();
                let den: f64 = u.iter().map(|row| row[j].powf(m)).sum();
                num / den
            })
            .collect();
        let moved = next.iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        c = next;
        if moved < 1e-15 {
            break;
        }
    }
    let u = memberships(&c);
    let jm = x
        .iter()
        .zip(&u)
        .map(|(xi, row)| row.iter().zip(&c).map(|(uij, cj)| uij.powf(m) * (xi - cj).powi(2)).sum::<f64>())
        .sum();
    (c, jm)
}
