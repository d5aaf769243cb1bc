//! Exact solution of the linearized density subproblem.
//!
//! The feasible set is a box intersected with a single volume equality, so the
//! linear program is a continuous knapsack: sorting by cost per unit volume and
//! filling greedily is optimal, and leaves at most one coordinate strictly
//! inside its bounds.

use crate::density::DensityField;
use crate::error::{Error, InfeasibleSide, Result};

/// Minimize `sum c_i x_i` subject to `sum w_i x_i = capacity`, `lower <= x <= upper`.
///
/// Coordinates are filled in ascending `c_i / w_i`, ties by ascending index.
/// Weights must be positive.
pub fn continuous_knapsack(
    costs: &[f64],
    weights: &[f64],
    lower: &[f64],
    upper: &[f64],
    capacity: f64,
) -> Result<Vec<f64>> {
    let n = costs.len();
    if weights.len() != n || lower.len() != n || upper.len() != n {
        return Err(Error::invalid("knapsack input lengths differ"));
    }
    if let Some(i) = (0..n).find(|&i| !(weights[i] > 0.0) || !(lower[i] <= upper[i])) {
        return Err(Error::invalid(format!(
            "coordinate {i}: weight {} bounds [{}, {}]",
            weights[i], lower[i], upper[i]
        )));
    }
    if costs.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("non-finite knapsack cost"));
    }

    let low_sum: f64 = weights.iter().zip(lower).map(|(w, l)| w * l).sum();
    let high_sum: f64 = weights.iter().zip(upper).map(|(w, u)| w * u).sum();
    let slack = 1e-12 * capacity.abs().max(high_sum.abs());
    if capacity < low_sum - slack {
        return Err(Error::Infeasible {
            side: InfeasibleSide::Lower,
            target: capacity,
            reachable: low_sum,
        });
    }
    if capacity > high_sum + slack {
        return Err(Error::Infeasible {
            side: InfeasibleSide::Upper,
            target: capacity,
            reachable: high_sum,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (costs[a] / weights[a])
            .total_cmp(&(costs[b] / weights[b]))
            .then(a.cmp(&b))
    });

    let mut x = lower.to_vec();
    let mut remaining = (capacity - low_sum).max(0.0);
    for i in order {
        if remaining <= 0.0 {
            break;
        }
        let room = (upper[i] - lower[i]) * weights[i];
        if remaining >= room {
            x[i] = upper[i];
            remaining -= room;
        } else {
            x[i] = lower[i] + remaining / weights[i];
            remaining = 0.0;
        }
    }
    Ok(x)
}

/// Minimize `sum g_e t_e` over active elements subject to the volume equality at
/// fraction `fraction` and the move-limited box around `prev`.
pub fn knapsack_update(
    g: &[f64],
    prev: &DensityField,
    fraction: f64,
    move_limit: f64,
) -> Result<DensityField> {
    let moves = vec![move_limit; prev.len()];
    knapsack_update_with_moves(g, prev, fraction, &moves)
}

/// As [`knapsack_update`] with a separate move limit per element.
pub fn knapsack_update_with_moves(
    g: &[f64],
    prev: &DensityField,
    fraction: f64,
    moves: &[f64],
) -> Result<DensityField> {
    if g.len() != prev.len() || moves.len() != prev.len() {
        return Err(Error::invalid(format!(
            "sensitivity length {} / move length {} for {} elements",
            g.len(),
            moves.len(),
            prev.len()
        )));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "volume fraction {fraction} outside (0, 1]"
        )));
    }
    let floor = prev.floor();
    let active: Vec<usize> = prev.active_indices().collect();
    let t = prev.values();
    let costs: Vec<f64> = active.iter().map(|&e| g[e]).collect();
    let weights: Vec<f64> = active.iter().map(|&e| prev.volumes()[e]).collect();
    let lower: Vec<f64> = active
        .iter()
        .map(|&e| (t[e] - moves[e]).max(floor))
        .collect();
    let upper: Vec<f64> = active.iter().map(|&e| (t[e] + moves[e]).min(1.0)).collect();
    let capacity = fraction * prev.domain_volume();
    let x = continuous_knapsack(&costs, &weights, &lower, &upper, capacity)?;

    let mut values = t.to_vec();
    for (&e, xe) in active.iter().zip(x) {
        values[e] = xe;
    }
    Ok(prev.with_values(values, fraction))
}
