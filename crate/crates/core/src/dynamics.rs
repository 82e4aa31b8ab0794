//! Double-integrator agent model.
//!
//! Each agent carries position and velocity; the control input is the
//! acceleration. Prediction over a horizon `t` uses the Euler form
//! `p' = p + v t + u t²/2`, `v' = v + u t`.

use crate::error::{invalid, Result};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentState {
    pub position: Vec2,
    pub velocity: Vec2,
    /// Input applied on the most recent step.
    pub last_input: Vec2,
}

impl AgentState {
    pub fn at_rest(position: Vec2) -> Self {
        Self {
            position,
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite() && self.last_input.is_finite()
    }
}

/// Speed, input and safety-radius limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub v_max: f64,
    pub u_max: f64,
    pub r_coll: f64,
}

impl Bounds {
    pub fn new(v_max: f64, u_max: f64, r_coll: f64) -> Result<Self> {
        let b = Self { v_max, u_max, r_coll };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("v_max", self.v_max), ("u_max", self.u_max), ("r_coll", self.r_coll)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Predicts the state reached after `horizon` seconds under a constant input.
pub fn predict_state(state: &AgentState, input: Vec2, horizon: f64) -> Result<AgentState> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    if !state.position.is_finite() || !state.velocity.is_finite() || !input.is_finite() {
        return Err(invalid("non-finite state or input"));
    }
    Ok(AgentState {
        position: state.position + state.velocity * horizon + input * (0.5 * horizon * horizon),
        velocity: state.velocity + input * horizon,
        last_input: input,
    })
}

/// One simulator tick. Same algebra as [`predict_state`] with `dt` as horizon.
pub fn integrate_step(state: &AgentState, input: Vec2, dt: f64) -> Result<AgentState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    predict_state(state, input, dt)
}

/// Relative slack on the bounds so that ladder rungs such as `5 × 0.14`
/// (which evaluates to 0.7000000000000001) still count as `u_max`.
pub const BOUND_REL_TOL: f64 = 1e-12;

/// Inclusive speed and input bound check.
pub fn is_feasible(predicted: &AgentState, input: Vec2, bounds: &Bounds) -> bool {
    input.norm() <= bounds.u_max * (1.0 + BOUND_REL_TOL)
        && predicted.velocity.norm() <= bounds.v_max * (1.0 + BOUND_REL_TOL)
}
