//! Flight-performance metrics.

use crate::error::{FlockError, Result};
use crate::mrf::NeighborGraph;
use crate::potentials::EPS_VELOCITY;
use crate::vec2::Vec2;

/// Metrics sampled at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub t: f64,
    pub order: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub d_avg: f64,
    /// Magnitude of the input each agent applied on the step ending at `t`.
    pub input_magnitudes: Vec<f64>,
}

/// Mean over agents of the mean neighbour velocity cosine.
///
/// Agents with an empty neighbour list (the leader) are left out of the
/// outer mean. Pairs involving a zero velocity contribute 0.
pub fn order_metric(velocities: &[Vec2], graph: &NeighborGraph) -> Result<f64> {
    if velocities.len() < 2 {
        return Err(FlockError::UndefinedMetric("order needs at least two agents".into()));
    }
    if velocities.len() != graph.len() {
        return Err(FlockError::InvalidArgument("velocity count and graph size differ".into()));
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for (i, v) in velocities.iter().enumerate() {
        let neighbors = graph.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let sum: f64 = neighbors.iter().map(|&j| v.cosine(velocities[j], EPS_VELOCITY)).sum();
        total += sum / neighbors.len() as f64;
        counted += 1;
    }
    if counted == 0 {
        return Err(FlockError::UndefinedMetric("no agent has neighbours".into()));
    }
    Ok(total / counted as f64)
}

/// Nearest-neighbour distance per agent, over all other agents.
pub fn nearest_neighbor_distances(positions: &[Vec2]) -> Result<Vec<f64>> {
    if positions.len() < 2 {
        return Err(FlockError::UndefinedMetric("distance metrics need at least two agents".into()));
    }
    Ok(positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            positions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| p.distance(*q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// `(d_min, d_max, d_avg)` of the nearest-neighbour distances.
pub fn distance_metrics(positions: &[Vec2]) -> Result<(f64, f64, f64)> {
    let d = nearest_neighbor_distances(positions)?;
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let avg = d.iter().sum::<f64>() / d.len() as f64;
    Ok((min, max, avg))
}

/// Mean input magnitude over the recorded ticks.
pub fn control_efficiency(input_history: &[Vec2]) -> Result<f64> {
    if input_history.is_empty() {
        return Err(FlockError::UndefinedMetric("empty input history".into()));
    }
    Ok(input_history.iter().map(|u| u.norm()).sum::<f64>() / input_history.len() as f64)
}

/// Polyline length of a sampled trajectory.
pub fn trajectory_length(position_history: &[Vec2]) -> Result<f64> {
    if position_history.len() < 2 {
        return Err(FlockError::UndefinedMetric("trajectory needs at least two samples".into()));
    }
    Ok(position_history.windows(2).map(|w| w[0].distance(w[1])).sum())
}

/// True iff every pairwise distance is at least `2·r_coll`.
pub fn collision_check(positions: &[Vec2], r_coll: f64) -> bool {
    let min_sep = 2.0 * r_coll;
    positions.iter().enumerate().all(|(i, p)| {
        positions[i + 1..].iter().all(|q| p.distance(*q) >= min_sep)
    })
}
