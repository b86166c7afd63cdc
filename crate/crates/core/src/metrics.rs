//! Cross-algorithm comparison on the fuzzy objective and the JSON reports
//! built from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcm::{compute_memberships, fcm_objective};
use crate::model::{CenterSet, PixelDataset};
use crate::pipeline::{Algorithm, SegmentationResult};

/// Divides each value by the mean of the two.
pub fn normalized_jm_pair(jm_a: f64, jm_b: f64) -> Result<(f64, f64)> {
    if !(jm_a >= 0.0 && jm_b >= 0.0) || !jm_a.is_finite() || !jm_b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "objective values must be finite and non-negative, got {jm_a} and {jm_b}"
        )));
    }
    if jm_a + jm_b == 0.0 {
        return Err(Error::UndefinedNormalization);
    }
    let avg = (jm_a + jm_b) / 2.0;
    Ok((jm_a / avg, jm_b / avg))
}

/// Fuzzy objective at the optimal memberships for `centers`. Used to put hard
/// and fuzzy clusterings on the same scale.
pub fn evaluate_jm(dataset: &PixelDataset, centers: &CenterSet, m: f64) -> f64 {
    let u = compute_memberships(dataset, centers, m);
    fcm_objective(dataset, centers, &u, m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmEntry {
    pub name: String,
    pub final_jm: f64,
    pub iterations: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPair {
    pub a: String,
    pub b: String,
    pub norm_a: f64,
    pub norm_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub image: String,
    pub seed: u64,
    pub algorithms: Vec<AlgorithmEntry>,
    pub normalized: Vec<NormalizedPair>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn entry(&self, name: &str) -> Option<&AlgorithmEntry> {
        self.algorithms.iter().find(|e| e.name == name)
    }
}

/// Assembles a report whose `final_jm` values are recomputed with
/// [`evaluate_jm`] from each result's centers.
pub fn build_report(
    image: &str,
    dataset: &PixelDataset,
    fuzzifier: f64,
    results: &[SegmentationResult],
    pairings: &[(Algorithm, Algorithm)],
) -> Result<ComparisonReport> {
    let first = results
        .first()
        .ok_or_else(|| Error::InvalidArgument("report needs at least one result".into()))?;
    let algorithms: Vec<AlgorithmEntry> = results
        .iter()
        .map(|r| AlgorithmEntry {
            name: r.algorithm.name().to_owned(),
            final_jm: evaluate_jm(dataset, &r.centers, fuzzifier),
            iterations: r.iterations,
            wall_time_ms: r.wall_time.as_millis() as u64,
        })
        .collect();
    let lookup = |a: Algorithm| {
        algorithms
            .iter()
            .find(|e| e.name == a.name())
            .map(|e| e.final_jm)
            .ok_or_else(|| Error::InvalidArgument(format!("pairing names `{a}` which has no result")))
    };
    let mut normalized = Vec::with_capacity(pairings.len());
    for &(a, b) in pairings {
        let (norm_a, norm_b) = normalized_jm_pair(lookup(a)?, lookup(b)?)?;
        normalized.push(NormalizedPair { a: a.name().into(), b: b.name().into(), norm_a, norm_b });
    }
    Ok(ComparisonReport { image: image.to_owned(), seed: first.seed, algorithms, normalized })
}

/// One (image, seed) run inside a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub image: String,
    pub seed: u64,
    /// `evaluate_jm` per algorithm, in algorithm order.
    pub jm: Vec<(String, f64)>,
    pub winners: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub name: String,
    pub mean_jm: f64,
    pub min_jm: f64,
    pub max_jm: f64,
    /// Fraction of runs where this algorithm reached the lowest objective.
    /// Tied winners are each credited, so rates sum to one only without ties.
    pub win_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub images: Vec<String>,
    pub seeds: Vec<u64>,
    pub clusters: usize,
    pub algorithms: Vec<BenchEntry>,
    pub runs: Vec<BenchRun>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Builds one bench run from a comparison report.
pub fn bench_run(report: &ComparisonReport) -> BenchRun {
    let jm: Vec<(String, f64)> =
        report.algorithms.iter().map(|e| (e.name.clone(), e.final_jm)).collect();
    let best = jm.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let winners = jm.iter().filter(|(_, v)| *v == best).map(|(n, _)| n.clone()).collect();
    BenchRun { image: report.image.clone(), seed: report.seed, jm, winners }
}

/// Per-algorithm aggregates over a set of runs. Algorithm order follows the
/// first run.
pub fn aggregate_bench(images: Vec<String>, seeds: Vec<u64>, clusters: usize, runs: Vec<BenchRun>) -> BenchReport {
    let names: Vec<String> = runs.first().map(|r| r.jm.iter().map(|(n, _)| n.clone()).collect()).unwrap_or_default();
    let algorithms = names
        .iter()
        .map(|name| {
            let values: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.jm.iter().find(|(n, _)| n == name).map(|(_, v)| *v))
                .collect();
            let count = values.len().max(1) as f64;
            let wins = runs.iter().filter(|r| r.winners.contains(name)).count();
            BenchEntry {
                name: name.clone(),
                mean_jm: values.iter().sum::<f64>() / count,
                min_jm: values.iter().copied().fold(f64::INFINITY, f64::min),
                max_jm: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                win_rate: wins as f64 / runs.len().max(1) as f64,
            }
        })
        .collect();
    BenchReport { images, seeds, clusters, algorithms, runs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Labeling;
    use std::time::Duration;

    fn result(algorithm: Algorithm, centers: &[f64]) -> SegmentationResult {
        SegmentationResult {
            algorithm,
            centers: CenterSet::from_scalars(centers).unwrap(),
            labels: Labeling::new(vec![0; 2], centers.len()).unwrap(),
            final_jm: 0.0,
            iterations: 3,
            swarm: None,
            fcm: None,
            wall_time: Duration::from_millis(12),
            seed: 9,
        }
    }

    #[test]
    fn normalization_cases() {
        let (a, b) = normalized_jm_pair(1.1638, 0.8362).unwrap();
        assert!((a - 1.1638).abs() < 1e-12 && (b - 0.8362).abs() < 1e-12);
        assert_eq!(normalized_jm_pair(5.0, 5.0).unwrap(), (1.0, 1.0));
        assert_eq!(normalized_jm_pair(2.0, 6.0).unwrap(), (0.5, 1.5));
        assert!(matches!(normalized_jm_pair(0.0, 0.0), Err(Error::UndefinedNormalization)));
        assert!(normalized_jm_pair(-1.0, 2.0).is_err());
    }

    #[test]
    fn evaluate_jm_cases() {
        let ds = PixelDataset::from_scalars(&[4.0, 4.0, 90.0]).unwrap();
        assert_eq!(evaluate_jm(&ds, &CenterSet::from_scalars(&[4.0, 90.0]).unwrap(), 2.0), 0.0);
        let px = PixelDataset::from_scalars(&[0.0]).unwrap();
        let v = evaluate_jm(&px, &CenterSet::from_scalars(&[1.0, 3.0]).unwrap(), 2.0);
        assert!((v - 0.9).abs() < 1e-12);
        let ds = PixelDataset::from_scalars(&[0.0, 7.0, 30.0, 31.0]).unwrap();
        let fwd = evaluate_jm(&ds, &CenterSet::from_scalars(&[2.0, 29.0, 15.0]).unwrap(), 2.0);
        let rev = evaluate_jm(&ds, &CenterSet::from_scalars(&[15.0, 2.0, 29.0]).unwrap(), 2.0);
        assert!((fwd - rev).abs() <= 1e-12 * fwd);
    }

    #[test]
    fn report_cases() {
        let ds = PixelDataset::from_scalars(&[0.0, 10.0]).unwrap();
        let single = build_report("img", &ds, 2.0, &[result(Algorithm::Fcm, &[1.0, 9.0])], &[]).unwrap();
        assert_eq!(single.algorithms.len(), 1);
        assert_eq!(single.seed, 9);
        assert_eq!(single.algorithms[0].wall_time_ms, 12);

        let equal = [result(Algorithm::Fcm, &[1.0, 9.0]), result(Algorithm::Apsof, &[9.0, 1.0])];
        let r = build_report("img", &ds, 2.0, &equal, &[(Algorithm::Fcm, Algorithm::Apsof)]).unwrap();
        assert!((r.normalized[0].norm_a - 1.0).abs() < 1e-12);
        assert!((r.normalized[0].norm_b - 1.0).abs() < 1e-12);

        let err = build_report("img", &ds, 2.0, &equal, &[(Algorithm::Fcm, Algorithm::Kmeans)]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        assert!(build_report("img", &ds, 2.0, &[], &[]).is_err());
    }

    #[test]
    fn half_objective_normalizes_to_thirds() {
        let (f, a) = normalized_jm_pair(2.0, 1.0).unwrap();
        assert!((f - 4.0 / 3.0).abs() < 1e-15);
        assert!((a - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn report_json_field_names() {
        let ds = PixelDataset::from_scalars(&[0.0, 10.0]).unwrap();
        let rs = [result(Algorithm::Fcm, &[1.0, 9.0]), result(Algorithm::Apsof, &[0.0, 10.0])];
        let r = build_report("face", &ds, 2.0, &rs, &[(Algorithm::Fcm, Algorithm::Apsof)]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["image"], "face");
        assert_eq!(v["seed"], 9);
        for key in ["name", "final_jm", "iterations", "wall_time_ms"] {
            assert!(v["algorithms"][0].get(key).is_some(), "{key}");
        }
        for key in ["a", "b", "norm_a", "norm_b"] {
            assert!(v["normalized"][0].get(key).is_some(), "{key}");
        }
        let back: ComparisonReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn bench_aggregate_single_run_equals_run() {
        let ds = PixelDataset::from_scalars(&[0.0, 10.0]).unwrap();
        let rs = [result(Algorithm::Fcm, &[1.0, 9.0]), result(Algorithm::Apsof, &[0.0, 10.0])];
        let r = build_report("x", &ds, 2.0, &rs, &[]).unwrap();
        let agg = aggregate_bench(vec!["x".into()], vec![9], 2, vec![bench_run(&r)]);
        for (entry, a) in agg.algorithms.iter().zip(&r.algorithms) {
            assert_eq!(entry.mean_jm, a.final_jm);
            assert_eq!(entry.min_jm, a.final_jm);
            assert_eq!(entry.max_jm, a.final_jm);
        }
        assert_eq!(agg.algorithms[1].win_rate, 1.0);
        assert_eq!(agg.algorithms[0].win_rate, 0.0);
    }
}
