mod common;

use hexvis::configspace::{corner_readings, lss_view, min_view_robots, symmetricity, total_distance};
use hexvis::simulator::random_symmetric;
use hexvis::{Configuration, Grid, HexVertex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_config(g: &Grid, seed: u64) -> Configuration<'_> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = [1, 2, 3, 6][seed as usize % 4];
    let max_orbits = g.vertex_count() / rho / 2;
    let orbits = 1 + (seed % 1000) as usize * 7 % max_orbits.min(12);
    random_symmetric(g, orbits, rho, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn view_is_rotation_invariant(k in 2usize..=6, seed in any::<u64>(), s in 1usize..6) {
        let g = Grid::new(k).unwrap();
        let c = random_config(&g, seed);
        let a = lss_view(&c).unwrap();
        let b = lss_view(&c.rotated(s)).unwrap();
        prop_assert_eq!(a.lss.len(), 6 * k * k);
        prop_assert_eq!(&a.lss, &b.lss);
        prop_assert_eq!(a.rho, b.rho);
        let mut rotated: Vec<HexVertex> =
            min_view_robots(&c).unwrap().iter().map(|&v| g.rotate(v, s).unwrap()).collect();
        rotated.sort();
        prop_assert_eq!(rotated, min_view_robots(&c.rotated(s)).unwrap());
    }

    #[test]
    fn symmetricity_counts_minimal_readings(k in 2usize..=6, seed in any::<u64>()) {
        let g = Grid::new(k).unwrap();
        let c = random_config(&g, seed);
        let rho = symmetricity(&c);
        prop_assert_eq!(rho, common::direct_symmetricity(&c));
        prop_assert_eq!(rho, lss_view(&c).unwrap().rho);
        prop_assert_eq!(min_view_robots(&c).unwrap().len(), rho);
    }

    #[test]
    fn total_distance_matches_a_double_loop(seed in any::<u64>()) {
        let g = Grid::new(4).unwrap();
        let c = random_config(&g, seed);
        let robots = c.robots();
        for &r in &robots {
            let bfs = common::bfs(&g, r);
            let naive: u32 = robots.iter().map(|w| bfs[w]).sum();
            prop_assert_eq!(total_distance(&c, r).unwrap(), naive);
        }
    }
}

#[test]
fn readings_separate_inequivalent_corners() {
    let mut distinct = 0;
    let mut asymmetric = 0;
    let mut seed = 0;
    while asymmetric < 200 {
        let g = Grid::new(4 + seed as usize % 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        seed += 1;
        let c = random_symmetric(&g, 12, 1, &mut rng).unwrap();
        asymmetric += 1;
        let mut readings = corner_readings(&c);
        readings.sort();
        readings.dedup();
        if readings.len() == 6 {
            distinct += 1;
        }
    }
    assert!(distinct * 100 >= 95 * asymmetric, "{distinct}/{asymmetric}");
}

#[test]
fn equivalent_corners_read_alike() {
    let g = Grid::new(5).unwrap();
    for seed in 0..40 {
        let c = random_config(&g, seed);
        let rho = symmetricity(&c);
        let readings = corner_readings(&c);
        for s in 0..6 {
            assert_eq!(readings[s], readings[(s + 6 / rho) % 6]);
        }
        let view = lss_view(&c).unwrap();
        for &s in &view.achievers {
            assert_eq!(readings[s], view.lss);
        }
    }
}

#[test]
fn file_round_trip() {
    let g = Grid::new(4).unwrap();
    let c = random_config(&g, 11);
    let text = serde_json::to_string(&c.to_file()).unwrap();
    let back = Configuration::from_file(&g, &serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, c);
    let off_grid = r#"{"k":4,"robots":[[9,9,9]]}"#;
    assert!(Configuration::from_file(&g, &serde_json::from_str(off_grid).unwrap()).is_err());
}
