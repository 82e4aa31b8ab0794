//! Discretized control-input set and per-agent candidate generation.

use std::f64::consts::TAU;

use crate::dynamics::{is_feasible, predict_state, AgentState, Bounds};
use crate::error::{invalid, FlockError, Result};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationConfig {
    /// Number of nonzero input directions.
    pub n_a: usize,
    /// Magnitude step of the input ladder, m/s².
    pub delta_u: f64,
    pub u_max: f64,
    /// Planning horizon, s.
    pub t_p: f64,
}

impl DiscretizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_a == 0 {
            return Err(invalid("n_a must be at least 1"));
        }
        if !(self.delta_u > 0.0 && self.delta_u <= self.u_max && self.u_max.is_finite()) {
            return Err(invalid(format!(
                "need 0 < delta_u <= u_max, got delta_u={} u_max={}",
                self.delta_u, self.u_max
            )));
        }
        if !(self.t_p.is_finite() && self.t_p > 0.0) {
            return Err(invalid(format!("t_p must be positive, got {}", self.t_p)));
        }
        Ok(())
    }

    /// Number of magnitude levels, `⌊u_max/Δu⌋`.
    pub fn magnitude_levels(&self) -> usize {
        // Table values like 0.7/0.14 land at 4.999999…; absorb that rounding.
        let ratio = self.u_max / self.delta_u;
        (ratio + 1e-9).floor() as usize
    }

    pub fn input_count(&self) -> usize {
        1 + self.n_a * self.magnitude_levels()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCandidate {
    pub input: Vec2,
    pub predicted: AgentState,
}

/// The discretized input set: zero first, then by ascending magnitude, then
/// by ascending direction index `k = 1..=n_a` with direction
/// `[sin(kθ), cos(kθ)]`, `θ = 2π/n_a`.
pub fn enumerate_inputs(config: &DiscretizationConfig) -> Vec<Vec2> {
    let levels = config.magnitude_levels();
    let theta_min = TAU / config.n_a as f64;
    let mut out = Vec::with_capacity(config.input_count());
    out.push(Vec2::ZERO);
    for m in 1..=levels {
        let magnitude = m as f64 * config.delta_u;
        for k in 1..=config.n_a {
            out.push(Vec2::from_heading_sin_cos(k as f64 * theta_min) * magnitude);
        }
    }
    out
}

/// All feasible candidates for `state`, in enumeration order.
///
/// Fails with [`FlockError::InfeasibleState`] when no enumerated input keeps
/// the predicted speed within `v_max`.
pub fn generate_candidates(
    state: &AgentState,
    config: &DiscretizationConfig,
    bounds: &Bounds,
) -> Result<Vec<ControlCandidate>> {
    let all = predict_all(state, config)?;
    let feasible: Vec<_> = all
        .into_iter()
        .filter(|c| is_feasible(&c.predicted, c.input, bounds))
        .collect();
    if feasible.is_empty() {
        return Err(FlockError::InfeasibleState(format!(
            "speed {:.4} m/s cannot be brought below v_max={} within t_p",
            state.velocity.norm(),
            bounds.v_max
        )));
    }
    Ok(feasible)
}

/// Like [`generate_candidates`], but when nothing is feasible it returns the
/// single input that minimizes predicted speed (ties to the lower index).
pub fn generate_candidates_or_brake(
    state: &AgentState,
    config: &DiscretizationConfig,
    bounds: &Bounds,
) -> Result<Vec<ControlCandidate>> {
    match generate_candidates(state, config, bounds) {
        Err(FlockError::InfeasibleState(_)) => {
            let all = predict_all(state, config)?;
            let mut best = all[0];
            for c in &all[1..] {
                if c.predicted.velocity.norm() < best.predicted.velocity.norm() {
                    best = *c;
                }
            }
            Ok(vec![best])
        }
        other => other,
    }
}

fn predict_all(state: &AgentState, config: &DiscretizationConfig) -> Result<Vec<ControlCandidate>> {
    config.validate()?;
    if !state.is_finite() {
        return Err(invalid("non-finite agent state"));
    }
    enumerate_inputs(config)
        .into_iter()
        .map(|input| {
            Ok(ControlCandidate {
                input,
                predicted: predict_state(state, input, config.t_p)?,
            })
        })
        .collect()
}
