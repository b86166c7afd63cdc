use apsof::fcm::compute_memberships;
use apsof::imaging::{load_ppm, write_ppm, RawImage};
use apsof::metrics::normalized_jm_pair;
use apsof::model::{assign_nearest, squared_distance};
use apsof::swarm::{swarm_stats, Swarm};
use apsof::{CenterSet, PixelDataset, SwarmConfig, SwarmMode};
use proptest::prelude::*;

fn dataset_and_centers() -> impl Strategy<Value = (PixelDataset, CenterSet)> {
    (1usize..=3, 1usize..=40, 1usize..=5).prop_flat_map(|(d, n, c)| {
        (
            prop::collection::vec(0.0..=255.0f64, n * d),
            prop::collection::vec(0.0..=255.0f64, c * d),
        )
            .prop_map(move |(px, cs)| (PixelDataset::new(px, d, n, 1).unwrap(), CenterSet::new(cs, d).unwrap()))
    })
}

proptest! {
    #[test]
    fn membership_rows_are_distributions((ds, cs) in dataset_and_centers(), m in 1.05..5.0f64) {
        let u = compute_memberships(&ds, &cs, m);
        for row in u.rows() {
            prop_assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn assignment_picks_a_nearest_center((ds, cs) in dataset_and_centers()) {
        let labels = assign_nearest(&ds, &cs).unwrap();
        for (x, &k) in ds.points().zip(labels.as_slice()) {
            let chosen = squared_distance(x, cs.center(k));
            prop_assert!(cs.iter().all(|c| chosen <= squared_distance(x, c)));
        }
    }

    #[test]
    fn memberships_follow_center_permutation((ds, cs) in dataset_and_centers(), shift in 0usize..5) {
        let c = cs.len();
        let order: Vec<usize> = (0..c).map(|k| (k + shift) % c).collect();
        let u = compute_memberships(&ds, &cs, 2.0);
        let up = compute_memberships(&ds, &cs.permuted(&order).unwrap(), 2.0);
        for (row, prow) in u.rows().zip(up.rows()) {
            // crisp rows pick the first coincident center, which moves under permutation
            if row.contains(&1.0) {
                continue;
            }
            for k in 0..c {
                prop_assert!((prow[k] - row[order[k]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn normalized_pair_sums_to_two_and_ignores_scale(a in 0.0..1e9f64, b in 1e-6..1e9f64, s in 1e-3..1e3f64) {
        let (na, nb) = normalized_jm_pair(a, b).unwrap();
        prop_assert!((na + nb - 2.0).abs() <= 1e-12);
        let (sa, sb) = normalized_jm_pair(a * s, b * s).unwrap();
        prop_assert!((sa - na).abs() <= 1e-9 && (sb - nb).abs() <= 1e-9);
    }

    #[test]
    fn stats_variance_identity(f in prop::collection::vec(0.0..1e6f64, 1..60)) {
        let s = swarm_stats(&f).unwrap();
        let n = f.len() as f64;
        let mean_sq = f.iter().map(|v| v * v).sum::<f64>() / n;
        prop_assert!((s.variance - (mean_sq - s.f_avg * s.f_avg)).abs() <= 1e-6 * mean_sq.max(1.0));
        prop_assert!(f.iter().all(|&v| s.f_min <= v));
    }

    #[test]
    fn swarm_stays_in_bounds(
        (ds, cs) in dataset_and_centers(),
        seed in any::<u64>(),
        adaptive in any::<bool>(),
        steps in 1usize..15,
    ) {
        let mode = if adaptive { SwarmMode::Adaptive } else { SwarmMode::Classic };
        let sc = SwarmConfig::default().with_mode(mode);
        let v_max = sc.v_max();
        let positions: Vec<Vec<f64>> = (0..4)
            .map(|k| cs.as_slice().iter().map(|v| (v + 37.0 * k as f64) % 256.0).collect())
            .collect();
        let mut swarm = Swarm::from_positions(&ds, positions, &sc, seed).unwrap();
        for _ in 0..steps {
            swarm.advance();
        }
        for p in &swarm.state().particles {
            prop_assert!(p.position.iter().all(|v| (0.0..=255.0).contains(v)));
            prop_assert!(p.velocity.iter().all(|v| v.abs() <= v_max));
            prop_assert!(p.pbest_fitness <= p.fitness);
            prop_assert!(swarm.state().gbest_fitness <= p.pbest_fitness);
        }
    }

    #[test]
    fn ppm_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u8>()) {
        let bytes: Vec<u8> = (0..w * h * 3).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
        let image = RawImage::new(w, h, bytes).unwrap();
        prop_assert_eq!(load_ppm(&write_ppm(&image)).unwrap(), image);
    }

    #[test]
    fn ppm_decoder_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let _ = load_ppm(&bytes);
    }
}
