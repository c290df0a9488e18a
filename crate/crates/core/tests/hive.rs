use horn_core::hive::{example_hive, hive_reconstruct, max_violation, Hive};
use proptest::prelude::*;

fn edge_identity(h: &Hive) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 1..=h.width {
        for j in 1..=h.height {
            let scale = h.f(i, j - 1).abs().max(h.f(i - 1, j - 1).abs()).max(h.f(i - 1, j).abs()).max(1.0);
            worst = worst.max((h.x(i, j) + h.y(i, j) + h.z(i, j)).abs() / scale);
        }
    }
    worst
}

proptest! {
    #[test]
    fn reconstruction_round_trips(w in 1usize..6, h in 1usize..6, seed in proptest::collection::vec(-5.0f64..5.0, 121)) {
        let span = w + h;
        // values on the full triangle i + j ≤ W + H, row length span + 1
        let g = |i: usize, j: usize| if i == 0 && j == 0 { 0.0 } else { seed[(i * 11 + j) % seed.len()] };
        let alpha: Vec<f64> = (1..=w).map(|i| g(i, 0) - g(i - 1, 0)).collect();
        let beta: Vec<f64> = (1..=span).map(|j| g(0, j) - g(0, j - 1)).collect();
        let z: Vec<Vec<f64>> = (1..=w).map(|i| (1..=span).map(|j| if i + j - 1 <= span { g(i - 1, j) - g(i, j - 1) } else { 0.0 }).collect()).collect();
        let hive = hive_reconstruct(&alpha, &beta, &z, 1e-9).unwrap();
        for i in 0..=w {
            for j in 0..=h {
                prop_assert!((hive.f(i, j) - g(i, j)).abs() <= 1e-9);
            }
        }
        prop_assert!(edge_identity(&hive) <= 1e-15);
    }
}

#[test]
fn example_hives_are_concave_with_balanced_edges() {
    for (w, h) in [(1, 1), (3, 7), (10, 10), (60, 60)] {
        let hive = example_hive(w, h).unwrap();
        assert!(max_violation(&hive) <= 1e-12);
        assert!(edge_identity(&hive) <= 1e-15);
    }
}
