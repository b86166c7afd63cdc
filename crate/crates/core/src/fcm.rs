//! Fuzzy C-means by alternating optimization of memberships and centers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    nearest_center, squared_distance, CenterSet, ClusterConfig, Labeling, MembershipMatrix,
    PixelDataset, EPS_ZERO,
};

/// Pixels per partial sum. Fixed so reductions combine in the same order at
/// any thread count.
pub(crate) const REDUCE_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    pub centers: CenterSet,
    pub memberships: MembershipMatrix,
    /// Argmax of each membership row.
    pub labels: Labeling,
    /// Objective evaluated at each visited center set.
    pub jm_trajectory: Vec<f64>,
    /// Number of center updates performed.
    pub iterations: usize,
    pub converged: bool,
}

impl FcmResult {
    pub fn final_jm(&self) -> f64 {
        self.jm_trajectory.last().copied().unwrap_or(0.0)
    }
}

#[inline]
fn weight(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        u * u
    } else {
        u.powf(m)
    }
}

fn membership_row(p: &[f64], centers: &CenterSet, m: f64, row: &mut [f64]) {
    for (slot, c) in row.iter_mut().zip(centers.iter()) {
        *slot = squared_distance(p, c);
    }
    if let Some(j) = row.iter().position(|&d2| d2 < EPS_ZERO * EPS_ZERO) {
        row.fill(0.0);
        row[j] = 1.0;
        return;
    }
    // (d_ij / d_ik)^(2/(m-1)) summed over k, written as normalized inverse powers
    let exponent = -1.0 / (m - 1.0);
    for d2 in row.iter_mut() {
        *d2 = if m == 2.0 { d2.recip() } else { d2.powf(exponent) };
    }
    let total: f64 = row.iter().sum();
    for v in row.iter_mut() {
        *v /= total;
    }
}

/// Optimal memberships for fixed centers. A pixel sitting on a center gets a
/// crisp row pointing at the first such center.
pub fn compute_memberships(dataset: &PixelDataset, centers: &CenterSet, m: f64) -> MembershipMatrix {
    let c = centers.len();
    let mut u = vec![0.0; dataset.len() * c];
    u.par_chunks_mut(c)
        .zip(dataset.as_slice().par_chunks_exact(dataset.dim()))
        .for_each(|(row, p)| membership_row(p, centers, m, row));
    MembershipMatrix::from_raw(u, c)
}

/// Membership-weighted means. Fails with [`Error::DeadCluster`] when a cluster
/// carries no weight at all.
pub fn update_centers(
    dataset: &PixelDataset,
    memberships: &MembershipMatrix,
    m: f64,
) -> Result<CenterSet> {
    if memberships.len() != dataset.len() {
        return Err(Error::InvalidArgument("membership rows do not match pixel count".into()));
    }
    let c = memberships.clusters();
    let d = dataset.dim();
    // per cluster: d weighted sums followed by the total weight
    let partials: Vec<Vec<f64>> = dataset
        .as_slice()
        .par_chunks(REDUCE_CHUNK * d)
        .zip(memberships.as_slice().par_chunks(REDUCE_CHUNK * c))
        .map(|(pixels, rows)| {
            let mut acc = vec![0.0; c * (d + 1)];
            for (p, row) in pixels.chunks_exact(d).zip(rows.chunks_exact(c)) {
                for (j, &u) in row.iter().enumerate() {
                    let w = weight(u, m);
                    let slot = &mut acc[j * (d + 1)..(j + 1) * (d + 1)];
                    for (s, x) in slot.iter_mut().zip(p) {
                        *s += w * x;
                    }
                    slot[d] += w;
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![0.0; c * (d + 1)];
    for part in &partials {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    let mut centers = Vec::with_capacity(c * d);
    for (j, slot) in acc.chunks_exact(d + 1).enumerate() {
        let total = slot[d];
        if !(total > 0.0) {
            return Err(Error::DeadCluster(j));
        }
        centers.extend(slot[..d].iter().map(|s| s / total));
    }
    CenterSet::new(centers, d)
}

/// Membership-weighted sum of squared pixel-to-center distances.
pub fn fcm_objective(
    dataset: &PixelDataset,
    centers: &CenterSet,
    memberships: &MembershipMatrix,
    m: f64,
) -> f64 {
    let c = centers.len();
    let d = dataset.dim();
    let partials: Vec<f64> = dataset
        .as_slice()
        .par_chunks(REDUCE_CHUNK * d)
        .zip(memberships.as_slice().par_chunks(REDUCE_CHUNK * c))
        .map(|(pixels, rows)| {
            let mut s = 0.0;
            for (p, row) in pixels.chunks_exact(d).zip(rows.chunks_exact(c)) {
                for (u, center) in row.iter().zip(centers.iter()) {
                    if *u > 0.0 {
                        s += weight(*u, m) * squared_distance(p, center);
                    }
                }
            }
            s
        })
        .collect();
    partials.iter().sum()
}

/// Moves center `dead` onto the pixel farthest from its nearest center.
fn reseed_center(dataset: &PixelDataset, centers: &mut CenterSet, dead: usize) {
    let mut far = (0, f64::NEG_INFINITY);
    for (i, p) in dataset.points().enumerate() {
        let d = nearest_center(p, centers).1;
        if d > far.1 {
            far = (i, d);
        }
    }
    centers.center_mut(dead).copy_from_slice(dataset.point(far.0));
}

/// Runs FCM from `initial_centers` until the relative change of the objective
/// drops to `fcm_rel_tol` or `fcm_max_iters` center updates have been made.
pub fn run_fcm(
    dataset: &PixelDataset,
    initial_centers: &CenterSet,
    config: &ClusterConfig,
) -> Result<FcmResult> {
    config.check()?;
    initial_centers.check_compatible(dataset)?;
    if initial_centers.len() != config.clusters {
        return Err(Error::InvalidArgument(format!(
            "{} initial centers for {} clusters",
            initial_centers.len(),
            config.clusters
        )));
    }
    let m = config.fuzzifier;
    let mut centers = initial_centers.clone();
    let mut trajectory: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut dead_streak = 0;
    let mut check_convergence = false;
    let mut converged = false;

    let memberships = loop {
        let u = compute_memberships(dataset, &centers, m);
        let jm = fcm_objective(dataset, &centers, &u, m);
        let previous = trajectory.last().copied();
        trajectory.push(jm);
        if let (true, Some(prev)) = (check_convergence, previous) {
            if (prev - jm).abs() <= config.fcm_rel_tol * prev.max(EPS_ZERO) {
                converged = true;
                break u;
            }
        }
        if iterations == config.fcm_max_iters {
            break u;
        }
        match update_centers(dataset, &u, m) {
            Ok(mut next) => {
                next.clamp_to_color_range();
                centers = next;
                iterations += 1;
                dead_streak = 0;
                check_convergence = true;
            }
            Err(Error::DeadCluster(j)) => {
                dead_streak += 1;
                if dead_streak >= config.clusters {
                    return Err(Error::DegenerateClustering(dead_streak));
                }
                reseed_center(dataset, &mut centers, j);
                check_convergence = false;
            }
            Err(e) => return Err(e),
        }
    };

    Ok(FcmResult {
        labels: memberships.argmax_labels(),
        centers,
        memberships,
        jm_trajectory: trajectory,
        iterations,
        converged,
    })
}
