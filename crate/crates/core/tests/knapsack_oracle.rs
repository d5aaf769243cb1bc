//! Greedy knapsack against exhaustive enumeration of basic feasible solutions.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topo_core::knapsack::{continuous_knapsack, knapsack_update};
use topo_core::{DensityField, GridMesh};

/// An optimal vertex of `{lo <= x <= hi, w.x = cap}` has at most one coordinate
/// strictly inside its bounds; try every choice of that coordinate and every
/// bound pattern for the rest.
fn enumerate(c: &[f64], w: &[f64], lo: &[f64], hi: &[f64], cap: f64) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    for free in 0..n {
        for mask in 0u32..(1 << (n - 1)) {
            let (mut used, mut cost, mut bit) = (0.0, 0.0, 0);
            for i in (0..n).filter(|&i| i != free) {
                let v = if (mask >> bit) & 1 == 1 { hi[i] } else { lo[i] };
                bit += 1;
                used += w[i] * v;
                cost += c[i] * v;
            }
            let x = (cap - used) / w[free];
            let slack = 1e-12 * (1.0 + hi[free].abs());
            if x >= lo[free] - slack && x <= hi[free] + slack {
                let total = cost + c[free] * x.clamp(lo[free], hi[free]);
                best = Some(best.map_or(total, |b: f64| b.min(total)));
            }
        }
    }
    best
}

struct Instance {
    c: Vec<f64>,
    w: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cap: f64,
}

fn draw(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.random_range(1..=12);
    let c: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                rng.random_range(-5.0..5.0)
            }
        })
        .collect();
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..3.0)).collect();
    let lo: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.6)).collect();
    let hi: Vec<f64> = lo
        .iter()
        .map(|&l| (l + rng.random_range(0.0..0.6)).min(1.0))
        .collect();
    let wl: f64 = w.iter().zip(&lo).map(|(a, b)| a * b).sum();
    let wh: f64 = w.iter().zip(&hi).map(|(a, b)| a * b).sum();
    let cap = wl + rng.random_range(0.0..=1.0) * (wh - wl);
    Instance { c, w, lo, hi, cap }
}

#[test]
fn greedy_matches_enumeration_on_200_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..200 {
        let p = draw(&mut rng);
        let x = continuous_knapsack(&p.c, &p.w, &p.lo, &p.hi, p.cap).unwrap();
        let got: f64 = p.c.iter().zip(&x).map(|(a, b)| a * b).sum();
        let best = enumerate(&p.c, &p.w, &p.lo, &p.hi, p.cap).unwrap();
        assert!(
            (got - best).abs() <= 1e-10 * best.abs().max(1.0),
            "instance {k}: {got} vs {best}"
        );
    }
}

#[test]
fn field_update_matches_enumeration() {
    let mesh = GridMesh::new(4, 3, 1.0, 0.75).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let prev = DensityField::from_values(
            &mesh,
            (0..12).map(|_| rng.random_range(0.3..0.7)).collect(),
            1e-3,
        )
        .unwrap();
        let g: Vec<f64> = (0..12).map(|_| -rng.random_range(0.0..1.0)).collect();
        let fraction = prev.fraction() + rng.random_range(-0.05..0.05);
        let next = knapsack_update(&g, &prev, fraction, 0.2).unwrap();
        let lo: Vec<f64> = prev.values().iter().map(|v| (v - 0.2).max(1e-3)).collect();
        let hi: Vec<f64> = prev.values().iter().map(|v| (v + 0.2).min(1.0)).collect();
        let v = vec![mesh.element_area(); 12];
        let cap = fraction * mesh.active_area();
        let best = enumerate(&g, &v, &lo, &hi, cap).unwrap();
        let got: f64 = g.iter().zip(next.values()).map(|(a, b)| a * b).sum();
        assert!((got - best).abs() <= 1e-10 * best.abs().max(1.0));
    }
}

/// Costs, weights, (lower, width) pairs and a capacity position in [0, 1].
type Draw = (Vec<f64>, Vec<f64>, Vec<(f64, f64)>, f64);

fn instance() -> impl Strategy<Value = Draw> {
    (1usize..20).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(0.01f64..5.0, n),
            prop::collection::vec((0.0f64..0.5, 0.0f64..0.5), n),
            0.0f64..=1.0,
        )
    })
}

proptest! {
    #[test]
    fn feasible_with_at_most_one_fractional((c, w, b, s) in instance()) {
        let lo: Vec<f64> = b.iter().map(|p| p.0).collect();
        let hi: Vec<f64> = b.iter().map(|p| p.0 + p.1).collect();
        let wl: f64 = w.iter().zip(&lo).map(|(a, b)| a * b).sum();
        let wh: f64 = w.iter().zip(&hi).map(|(a, b)| a * b).sum();
        let cap = wl + s * (wh - wl);
        let x = continuous_knapsack(&c, &w, &lo, &hi, cap).unwrap();
        let used: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((used - cap).abs() <= 1e-10 * cap.abs().max(1.0));
        let mut interior = 0;
        for i in 0..x.len() {
            prop_assert!(x[i] >= lo[i] && x[i] <= hi[i]);
            if x[i] > lo[i] && x[i] < hi[i] {
                interior += 1;
            }
        }
        prop_assert!(interior <= 1);
    }

    #[test]
    fn capacity_outside_range_is_infeasible(extra in 0.01f64..10.0, n in 1usize..10) {
        let c = vec![1.0; n];
        let w = vec![1.0; n];
        let lo = vec![0.1; n];
        let hi = vec![0.9; n];
        prop_assert!(continuous_knapsack(&c, &w, &lo, &hi, 0.9 * n as f64 + extra).is_err());
        prop_assert!(continuous_knapsack(&c, &w, &lo, &hi, 0.1 * n as f64 - extra).is_err());
    }
}
